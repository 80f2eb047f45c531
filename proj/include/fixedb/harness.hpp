#pragma once

#include "fixedb/calibrate.hpp"
#include "fixedb/fixedb_limits.hpp"
#include "fixedb/resampling.hpp"
#include "fixedb/series_gen.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fixedb {

enum class ExperimentTarget { CI_MEAN, CI_TRIMMED_MEAN, REGION_MEAN_MEDIAN, CDF_BAND, SPEC_BAND };

// How the nominal level is turned into a cutoff:
//   SMALL_B      use alpha as-is (the traditional set)
//   FIXED_B      swap alpha for the limiting-null level (CI targets)
//   DOUBLE_SS    second-stage p-value threshold with a fixed window
//   DOUBLE_SS_BS same, window chosen per replication by the data-driven rule
enum class HarnessCalibration { SMALL_B, FIXED_B, DOUBLE_SS, DOUBLE_SS_BS };

struct ExperimentConfig {
    ModelSpec model;
    std::size_t n = 100;
    std::vector<double> b_list;
    double alpha = 0.05;
    ExperimentTarget target = ExperimentTarget::CI_MEAN;
    CiMethod method = CiMethod::SS;
    std::size_t B = 5000;
    HarnessCalibration calibration = HarnessCalibration::SMALL_B;
    CiShape shape = CiShape::SYMMETRIC;
    double trim = 0.25;          // CI_TRIMMED_MEAN
    std::size_t n_prime = 0;     // 0: default (15 regions, 30 bands)
    std::size_t K1 = 5;          // DOUBLE_SS_BS
    std::size_t K2 = 40;
    double g = 0.75;
    std::size_t reps = 1000;
    std::uint64_t seed = 12345;
    unsigned threads = 1;
};

void validate(const ExperimentConfig& cfg);
std::size_t effective_n_prime(const ExperimentConfig& cfg);

// Flat "key = value" text; '#' starts a comment; unknown keys are errors.
ExperimentConfig parse_config(std::istream& is);
ExperimentConfig load_config(const std::string& path);

struct CoverageRow {
    std::string model, err, method, calibration, target;
    double rho = 0.0, theta = 0.0;
    std::size_t n = 0;
    double b = 0.0, alpha = 0.0;
    double coverage = 0.0;  // multiple of 1/reps
    double mean_size = 0.0; // interval width / region radius / band width
    std::size_t reps = 0;
    std::uint64_t seed = 0;
};

// One row per entry of b_list. Replication r derives every random input
// from the substream chain (seed, r): slot 0 seeds the series, slot 1 + i
// seeds the bootstrap for b_list[i]. Scheduling replications across any
// number of workers cannot change the output.
std::vector<CoverageRow> run_experiment(const ExperimentConfig& cfg);

void write_coverage_csv(std::ostream& os, std::span<const CoverageRow> rows);

// --- truth oracles ---------------------------------------------------------

// Marginal location functionals of the stationary law. Cases with a closed
// form (ARMA means are mu; symmetric stationary laws put every location
// functional at mu) are answered exactly; everything else is read off one
// long simulated realization (1e7 stationary draws, fixed internal seed).
double true_scalar(const ModelSpec& model, const EstimatorComponent& c);
std::vector<double> true_vector(const ModelSpec& model, const Estimator& est);

// Marginal CDF: exact normal for Gaussian ARMA, else the long-simulation
// empirical CDF.
class TruthCdf {
public:
    explicit TruthCdf(const ModelSpec& model);
    double operator()(double x) const;

private:
    bool analytic_ = false;
    double mu_ = 0.0, sd_ = 1.0;
    std::vector<double> sorted_; // empirical branch
};

// Normalized spectral distribution of an ARMA model on a grid, by
// quadrature of the closed-form spectral density. Other families have no
// closed form and are rejected.
std::vector<double> true_spectral_cdf_on(const ModelSpec& model,
                                         std::span<const double> grid);

// --- calibration-table regeneration ----------------------------------------

struct RegenConfig {
    LimitSimConfig sim;
    std::vector<double> b_grid;      // empty: 0.01..0.20 step 0.01
    std::vector<double> alphas;      // empty: {0.05, 0.10}
};

// Simulates quantiles of the four limiting laws over the grid and fits one
// quadratic per (kind, alpha). Bootstrap rows only use grid entries with
// integer 1/b; skipped entries are reported on `log` when given.
std::vector<CvFit> regen_cv_table(const RegenConfig& cfg, std::ostream* log);

// One finite value per non-comment line; '#' starts a comment.
Series read_series_file(const std::string& path);

std::string to_string(ExperimentTarget t);
std::string to_string(HarnessCalibration c);
std::string to_string(CiMethod m);

} // namespace fixedb
