#pragma once

#include "fixedb/resampling.hpp"

#include <span>
#include <vector>

namespace fixedb {

enum class CalibTarget { REGION, CDF_BAND, SPEC_BAND };

// Block length used inside the second stage: ceil(n_prime * b), where b is
// the first-stage block fraction; spectral bands need at least 2 points.
std::size_t second_stage_block(std::size_t n_prime, double b, CalibTarget target);

// One p-value per length-n_prime window of the series: the window is
// treated as a sample of size n_prime whose null value is the full-sample
// statistic, and the first-stage p-value recipe is replayed inside it with
// block length ceil(n_prime * b). Their empirical distribution estimates
// the finite-sample law of the first-stage p-value. est is only consulted
// for REGION; the band targets compare ECDFs or normalized spectral
// distributions instead. Every value is a multiple of 1/(n_prime - l' + 1).
std::vector<double> second_stage_pvalues(std::span<const double> ts,
                                         const BlockSpec& spec, std::size_t n_prime,
                                         CalibTarget target, const Estimator& est);

// ceil(alpha * count)-th order statistic of the second-stage p-values: the
// data-driven cutoff that replaces alpha in the calibrated set.
double calibrated_threshold(std::vector<double> values, double alpha);

// Smallest hit count whose p-value clears the threshold, floored at one:
// a confidence set always demands at least one window statistic at or
// above the candidate's deviation, so threshold 0 inverts to the largest
// statistic (the same convention as the interval construction, which takes
// the empirical quantile at 1 - threshold).
std::size_t min_hits_for_threshold(double threshold, std::size_t count);

// Euclidean ball for a vector estimate, cut from the p-value level set
// {theta : pvalue(theta) >= threshold} by exact inversion of the step
// function; radius is the largest distance still accepted (closed
// inequality, so ties land inside).
struct CalibratedRegion {
    std::vector<double> center; // full-sample estimate
    std::vector<double> stats;  // sorted sqrt(l) * ||window - full|| values
    std::size_t n = 0;
    double threshold = 0.0;
    double radius = 0.0;

    // Exactly the defining inequality: #{stats >= sqrt(n)*||center-theta||}
    // at least min_hits_for_threshold(threshold, N).
    bool contains(std::span<const double> theta) const;
    double pvalue(std::span<const double> theta) const;
};

CalibratedRegion region_from_threshold(std::span<const double> ts, const BlockSpec& spec,
                                       const Estimator& est, double threshold);
CalibratedRegion calibrated_region(std::span<const double> ts, const BlockSpec& spec,
                                   const Estimator& est, double alpha,
                                   std::size_t n_prime);

// Sup-norm band around the empirical CDF (grid: sorted distinct data
// values) or the normalized spectral distribution (grid: full-sample
// Fourier frequencies). Candidates are compared on the stored grid.
struct CalibratedBand {
    CalibTarget target = CalibTarget::CDF_BAND;
    std::vector<double> grid;
    std::vector<double> center; // center function on grid
    std::vector<double> stats;  // sorted sqrt(l) * sup-norm window stats
    std::size_t n = 0;
    double threshold = 0.0;
    double radius = 0.0;

    bool contains(std::span<const double> candidate_on_grid) const;
    double pvalue(std::span<const double> candidate_on_grid) const;
};

CalibratedBand band_from_threshold(std::span<const double> ts, const BlockSpec& spec,
                                   CalibTarget target, double threshold);
CalibratedBand calibrated_band(std::span<const double> ts, const BlockSpec& spec,
                               CalibTarget target, double alpha, std::size_t n_prime);

// Data-driven choice of the second-stage window. Candidates shrink
// geometrically from K2 while they stay at or above K1; the selected pair
// of consecutive candidates is the one whose second-stage p-value
// distributions are closest in sup norm (ties: the pair with the larger
// blocks). Returns the SMALLER window of that pair, a deliberate
// convention kept from the selection rule's published form.
struct BsSelection {
    std::vector<std::size_t> candidates;
    std::vector<double> distances; // between consecutive candidates
    std::size_t pair_index = 0;    // 0-based index into distances
    std::size_t selected = 0;      // candidates[pair_index + 1]
};

BsSelection bickel_sakov_select(std::span<const double> ts, const BlockSpec& spec,
                                std::size_t K1, std::size_t K2, double g,
                                CalibTarget target, const Estimator& est);

} // namespace fixedb
