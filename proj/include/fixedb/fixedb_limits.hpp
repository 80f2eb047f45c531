#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace fixedb {

// Limiting null distributions of the block-resampling p-values when the
// block fraction b = l/n stays fixed:
//   G / GTILDE  subsampling, one-sided / symmetric statistic
//   H / HTILDE  moving-block bootstrap, one-sided / symmetric statistic
enum class CvKind { G, GTILDE, H, HTILDE };

struct LimitSimConfig {
    std::size_t paths = 50000;      // Monte Carlo replications
    std::size_t grid_n = 5000;      // partial-sum steps approximating the Brownian path
    std::size_t boot_draws = 50000; // inner uniform draws per path (H/HTILDE only)
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

// Smaller preset for interactive work; retains the coefficient signs and
// rough magnitudes at a fraction of the cost.
LimitSimConfig desk_preset(std::uint64_t seed);

// One realization per path of the limiting p-value functional; values lie in
// [0, 1]. Path i draws from the substream (seed, i), so results do not
// depend on scheduling. simulate_G_samples accepts G/GTILDE,
// simulate_H_samples accepts H/HTILDE (and needs 1/b to be an integer).
std::vector<double> simulate_G_samples(double b, CvKind kind, const LimitSimConfig& cfg);
std::vector<double> simulate_H_samples(double b, CvKind kind, const LimitSimConfig& cfg);

// Both limit samples of one resampling scheme from a single sweep of the
// shared Brownian paths. one_sided feeds G or H rows, symmetric feeds
// GTILDE or HTILDE rows.
struct LimitSamplePair {
    std::vector<double> one_sided;
    std::vector<double> symmetric;
};
LimitSamplePair simulate_sub_limit_pair(double b, const LimitSimConfig& cfg);
LimitSamplePair simulate_boot_limit_pair(double b, const LimitSimConfig& cfg);

// Empirical alpha-quantile of the corresponding limit sample: the
// calibrated level that replaces alpha in a fixed-b confidence set.
double simulate_G(double b, double alpha, CvKind kind, const LimitSimConfig& cfg);
double simulate_H(double b, double alpha, CvKind kind, const LimitSimConfig& cfg);

// Vector analogue of the symmetric subsampling limit for a k-dimensional
// statistic with long-run covariance sigma (k x k, row-major, SPD). The
// matrix square root is the lower Cholesky factor; any factor A with
// A*A^T = sigma induces the same law. Returns one realization per path.
std::vector<double> simulate_Gk_sample(double b, std::size_t k,
                                       std::span<const double> sigma,
                                       const LimitSimConfig& cfg);

// Quadratic calibration curve cv(b) = a0 + a1*b + a2*b^2 with a0 pinned at
// alpha, fitted by least squares of (cv - alpha) on (b, b^2) with no
// intercept. r2 is measured against the centered total sum of squares.
struct CvFit {
    CvKind kind = CvKind::G;
    double alpha = 0.0;
    double a0 = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
    double r2 = 0.0;

    double operator()(double b) const { return a0 + b * (a1 + b * a2); }
};

// Constant cv input is degenerate: by convention a1 = a2 = 0 and r2 = 0.
CvFit fit_cv_poly(std::span<const double> b_grid, std::span<const double> cv,
                  double alpha);

// Precomputed calibration table (full-scale simulation) for
// alpha in {0.05, 0.10}. Evaluates the quadratic at b; requires
// 0 < b <= 0.2 and raises if the curve is nonpositive there.
double cv_lookup(CvKind kind, double alpha, double b);

const std::vector<CvFit>& builtin_cv_table();

// Plain-text rows "kind,alpha,a0,a1,a2,r2".
void write_cv_table(std::ostream& os, std::span<const CvFit> table);
std::vector<CvFit> read_cv_table(std::istream& is);

std::string to_string(CvKind kind);
CvKind cv_kind_from_string(const std::string& s);

} // namespace fixedb
