#pragma once

#include "fixedb/estimators.hpp"
#include "fixedb/series_gen.hpp"

#include <cstdint>
#include <random>
#include <span>

namespace fixedb {

// Overlapping-block geometry: windows of length l inside a series of
// length n, started at each of the n - l + 1 positions.
struct BlockSpec {
    std::size_t n = 0;
    std::size_t l = 0;

    double b() const { return static_cast<double>(l) / static_cast<double>(n); }
    std::size_t num_starts() const { return n - l + 1; }
};

void validate(const BlockSpec& spec);

enum class PValueKind { UPPER, LOWER, SYMMETRIC, VECTOR_NORM };

// Sorted multiset of resampled statistic values.
struct EmpiricalDist {
    std::vector<double> values; // ascending
};

// ceil(q * count)-th order statistic, q in (0, 1].
double empirical_quantile(const EmpiricalDist& dist, double q);

// Exact p-value: hits / draws.
struct Rational {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Scaled sampling distribution over all windows: sqrt(l) * d(window, full)
// where d is the signed difference (UPPER/LOWER, scalar), its absolute
// value (SYMMETRIC, scalar), or the Euclidean norm (VECTOR_NORM).
EmpiricalDist subsample_stats(std::span<const double> ts, const BlockSpec& spec,
                              const Estimator& est, PValueKind kind);

// Fraction of windows whose scaled statistic is at least as extreme as the
// full-sample statistic against theta0. Ties count as extreme (closed
// inequality), so atoms are treated conservatively. Always a multiple of
// 1/(n - l + 1).
Rational subsample_pvalue(std::span<const double> ts, const BlockSpec& spec,
                          const Estimator& est, std::span<const double> theta0,
                          PValueKind kind);

// One moving-block bootstrap pseudo-series: floor(n/l) whole blocks drawn
// uniformly from the n - l + 1 starts, then, if l does not divide n, the
// first n - l*floor(n/l) values of one more block whose start is uniform
// over the n - r + 1 positions that fit a length-r fragment.
Series mbb_resample(std::span<const double> ts, const BlockSpec& spec,
                    std::mt19937_64& engine);

// Monte Carlo bootstrap p-value over B pseudo-series; replicate i draws
// from the substream (seed, i), so the result is independent of evaluation
// order. Always a multiple of 1/B.
Rational mbb_pvalue(std::span<const double> ts, const BlockSpec& spec,
                    const Estimator& est, std::span<const double> theta0,
                    PValueKind kind, std::size_t B, std::uint64_t seed);

// Exact bootstrap p-value by full enumeration of every block combination.
// Feasible only for toy sizes; requires n <= 12 and at most ~1e8 samples.
Rational mbb_pvalue_exact(std::span<const double> ts, const BlockSpec& spec,
                          const Estimator& est, std::span<const double> theta0,
                          PValueKind kind);

// Total number of equally likely bootstrap samples the enumeration visits,
// or 0 on overflow.
std::uint64_t mbb_enumeration_count(const BlockSpec& spec);

enum class CiShape { ONE_SIDED_UPPER, ONE_SIDED_LOWER, EQUAL_TAILED, SYMMETRIC };
enum class CiMethod { SS, MBB };
enum class CiCalibration { SMALL_B, FIXED_B };

struct Interval {
    double lo = 0.0; // -inf for ONE_SIDED_LOWER
    double hi = 0.0; // +inf for ONE_SIDED_UPPER

    bool contains(double x) const { return lo <= x && x <= hi; }
    double width() const { return hi - lo; }
};

struct CiOptions {
    double alpha = 0.05;
    CiShape shape = CiShape::SYMMETRIC;
    CiMethod method = CiMethod::SS;
    CiCalibration calibration = CiCalibration::SMALL_B;
    std::size_t B = 5000;      // MBB only
    std::uint64_t seed = 0;    // MBB only
};

// Confidence interval for a scalar estimator. SMALL_B uses the nominal
// level directly; FIXED_B swaps it for the precomputed limiting-null level
// at this b (requires b <= 0.2 and a supported alpha), which widens the
// interval to undo the small-b approximation error.
Interval build_ci(std::span<const double> ts, const BlockSpec& spec,
                  const Estimator& est, const CiOptions& opt);

} // namespace fixedb
