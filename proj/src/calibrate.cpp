#include "fixedb/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fixedb {

namespace {

constexpr double kIndexEps = 1e-9;

double vec_norm_diff(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double best = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        best = std::max(best, std::abs(a[i] - b[i]));
    return best;
}

void check_second_stage(const BlockSpec& spec, std::size_t n_prime, std::size_t l_prime) {
    if (n_prime < 2 || n_prime >= spec.n)
        throw std::invalid_argument("second stage: need 2 <= n_prime < n");
    if (l_prime > n_prime)
        throw std::invalid_argument("second stage: block exceeds n_prime");
}

// Count of sorted values >= x.
std::size_t count_at_least(const std::vector<double>& sorted, double x) {
    return sorted.size() -
           static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), x) -
                                    sorted.begin());
}

double invert_radius(const std::vector<double>& sorted_stats, std::size_t n,
                     double threshold) {
    const std::size_t K = min_hits_for_threshold(threshold, sorted_stats.size());
    return sorted_stats[sorted_stats.size() - K] / std::sqrt(static_cast<double>(n));
}

} // namespace

std::size_t second_stage_block(std::size_t n_prime, double b, CalibTarget target) {
    if (!(b > 0.0 && b <= 1.0))
        throw std::invalid_argument("second_stage_block: b must be in (0, 1]");
    auto l = static_cast<std::size_t>(
        std::ceil(b * static_cast<double>(n_prime) - kIndexEps));
    if (l < 1) l = 1;
    if (target == CalibTarget::SPEC_BAND && l < 2) l = 2;
    return l;
}

std::size_t min_hits_for_threshold(double threshold, std::size_t count) {
    if (threshold <= 0.0) return 1;
    double raw = std::ceil(threshold * static_cast<double>(count) - kIndexEps);
    auto k = static_cast<std::size_t>(raw < 1.0 ? 1.0 : raw);
    return k > count ? count + 1 : k; // count+1: unattainable, empty set
}

double calibrated_threshold(std::vector<double> values, double alpha) {
    if (values.empty()) throw std::invalid_argument("calibrated_threshold: empty sample");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("calibrated_threshold: alpha must be in (0, 1)");
    std::sort(values.begin(), values.end());
    EmpiricalDist dist{std::move(values)};
    return empirical_quantile(dist, alpha);
}

namespace {

std::vector<double> second_stage_region(std::span<const double> ts, const BlockSpec& spec,
                                        std::size_t n_prime, const Estimator& est) {
    const std::size_t l_prime = second_stage_block(n_prime, spec.b(), CalibTarget::REGION);
    check_second_stage(spec, n_prime, l_prime);
    const std::size_t n = spec.n;
    const std::size_t inner_starts = n_prime - l_prime + 1;
    const auto full = point_estimate(ts, 0, n, est);
    const double root_np = std::sqrt(static_cast<double>(n_prime));
    const double root_lp = std::sqrt(static_cast<double>(l_prime));

    // Every length-l' window estimate, shared across outer windows.
    std::vector<std::vector<double>> small(n - l_prime + 1);
    for (std::size_t j = 0; j + l_prime <= n; ++j)
        small[j] = point_estimate(ts, j, l_prime, est);

    std::vector<double> out;
    out.reserve(n - n_prime + 1);
    for (std::size_t t = 0; t + n_prime <= n; ++t) {
        const auto win = point_estimate(ts, t, n_prime, est);
        const double rhs = root_np * vec_norm_diff(win, full);
        std::size_t hits = 0;
        for (std::size_t j = t; j < t + inner_starts; ++j)
            if (root_lp * vec_norm_diff(small[j], win) >= rhs) ++hits;
        out.push_back(static_cast<double>(hits) / static_cast<double>(inner_starts));
    }
    return out;
}

std::vector<double> second_stage_cdf(std::span<const double> ts, const BlockSpec& spec,
                                     std::size_t n_prime) {
    const std::size_t l_prime = second_stage_block(n_prime, spec.b(), CalibTarget::CDF_BAND);
    check_second_stage(spec, n_prime, l_prime);
    const std::size_t n = spec.n;
    const std::size_t inner_starts = n_prime - l_prime + 1;
    const double root_np = std::sqrt(static_cast<double>(n_prime));
    const double root_lp = std::sqrt(static_cast<double>(l_prime));

    std::vector<double> full_sorted(ts.begin(), ts.end());
    std::sort(full_sorted.begin(), full_sorted.end());
    std::vector<std::vector<double>> small(n - l_prime + 1);
    for (std::size_t j = 0; j + l_prime <= n; ++j) {
        small[j].assign(ts.begin() + static_cast<std::ptrdiff_t>(j),
                        ts.begin() + static_cast<std::ptrdiff_t>(j + l_prime));
        std::sort(small[j].begin(), small[j].end());
    }

    std::vector<double> out;
    out.reserve(n - n_prime + 1);
    std::vector<double> win;
    for (std::size_t t = 0; t + n_prime <= n; ++t) {
        win.assign(ts.begin() + static_cast<std::ptrdiff_t>(t),
                   ts.begin() + static_cast<std::ptrdiff_t>(t + n_prime));
        std::sort(win.begin(), win.end());
        const double rhs = root_np * ecdf_sup_distance(win, full_sorted);
        std::size_t hits = 0;
        for (std::size_t j = t; j < t + inner_starts; ++j)
            if (root_lp * ecdf_sup_distance(small[j], win) >= rhs) ++hits;
        out.push_back(static_cast<double>(hits) / static_cast<double>(inner_starts));
    }
    return out;
}

std::vector<double> second_stage_spec(std::span<const double> ts, const BlockSpec& spec,
                                      std::size_t n_prime) {
    const std::size_t l_prime = second_stage_block(n_prime, spec.b(), CalibTarget::SPEC_BAND);
    check_second_stage(spec, n_prime, l_prime);
    const std::size_t n = spec.n;
    const std::size_t inner_starts = n_prime - l_prime + 1;
    const double root_np = std::sqrt(static_cast<double>(n_prime));
    const double root_lp = std::sqrt(static_cast<double>(l_prime));

    // All spectral distributions are compared on the full sample's grid.
    const StepFunction full = spectral_distribution(ts, 0, n, true);
    const std::vector<double>& grid = full.grid;
    std::vector<std::vector<double>> small(n - l_prime + 1);
    for (std::size_t j = 0; j + l_prime <= n; ++j)
        small[j] = eval_on_grid(spectral_distribution(ts, j, l_prime, true), grid);

    std::vector<double> out;
    out.reserve(n - n_prime + 1);
    for (std::size_t t = 0; t + n_prime <= n; ++t) {
        const auto win = eval_on_grid(spectral_distribution(ts, t, n_prime, true), grid);
        const double rhs = root_np * max_abs_diff(win, full.value);
        std::size_t hits = 0;
        for (std::size_t j = t; j < t + inner_starts; ++j)
            if (root_lp * max_abs_diff(small[j], win) >= rhs) ++hits;
        out.push_back(static_cast<double>(hits) / static_cast<double>(inner_starts));
    }
    return out;
}

} // namespace

std::vector<double> second_stage_pvalues(std::span<const double> ts,
                                         const BlockSpec& spec, std::size_t n_prime,
                                         CalibTarget target, const Estimator& est) {
    validate(spec);
    if (ts.size() != spec.n)
        throw std::invalid_argument("second_stage_pvalues: series length != n");
    switch (target) {
    case CalibTarget::REGION: return second_stage_region(ts, spec, n_prime, est);
    case CalibTarget::CDF_BAND: return second_stage_cdf(ts, spec, n_prime);
    case CalibTarget::SPEC_BAND: return second_stage_spec(ts, spec, n_prime);
    }
    throw std::logic_error("unreachable calibration target");
}

bool CalibratedRegion::contains(std::span<const double> theta) const {
    if (theta.size() != center.size())
        throw std::invalid_argument("region contains: dimension mismatch");
    const double d = vec_norm_diff(center, theta) * std::sqrt(static_cast<double>(n));
    return count_at_least(stats, d) >= min_hits_for_threshold(threshold, stats.size());
}

double CalibratedRegion::pvalue(std::span<const double> theta) const {
    if (theta.size() != center.size())
        throw std::invalid_argument("region pvalue: dimension mismatch");
    const double d = vec_norm_diff(center, theta) * std::sqrt(static_cast<double>(n));
    return static_cast<double>(count_at_least(stats, d)) /
           static_cast<double>(stats.size());
}

CalibratedRegion region_from_threshold(std::span<const double> ts, const BlockSpec& spec,
                                       const Estimator& est, double threshold) {
    validate(spec);
    if (ts.size() != spec.n)
        throw std::invalid_argument("region_from_threshold: series length != n");
    if (threshold < 0.0 || threshold > 1.0)
        throw std::invalid_argument("region_from_threshold: threshold must be in [0, 1]");
    CalibratedRegion region;
    region.center = point_estimate(ts, 0, spec.n, est);
    region.stats =
        subsample_stats(ts, spec, est, PValueKind::VECTOR_NORM).values;
    region.n = spec.n;
    region.threshold = threshold;
    region.radius = invert_radius(region.stats, spec.n, threshold);
    return region;
}

CalibratedRegion calibrated_region(std::span<const double> ts, const BlockSpec& spec,
                                   const Estimator& est, double alpha,
                                   std::size_t n_prime) {
    const double c = calibrated_threshold(
        second_stage_pvalues(ts, spec, n_prime, CalibTarget::REGION, est), alpha);
    return region_from_threshold(ts, spec, est, c);
}

bool CalibratedBand::contains(std::span<const double> candidate_on_grid) const {
    if (candidate_on_grid.size() != grid.size())
        throw std::invalid_argument("band contains: candidate grid mismatch");
    const double d = max_abs_diff(center, candidate_on_grid) *
                     std::sqrt(static_cast<double>(n));
    return count_at_least(stats, d) >= min_hits_for_threshold(threshold, stats.size());
}

double CalibratedBand::pvalue(std::span<const double> candidate_on_grid) const {
    if (candidate_on_grid.size() != grid.size())
        throw std::invalid_argument("band pvalue: candidate grid mismatch");
    const double d = max_abs_diff(center, candidate_on_grid) *
                     std::sqrt(static_cast<double>(n));
    return static_cast<double>(count_at_least(stats, d)) /
           static_cast<double>(stats.size());
}

CalibratedBand band_from_threshold(std::span<const double> ts, const BlockSpec& spec,
                                   CalibTarget target, double threshold) {
    validate(spec);
    if (ts.size() != spec.n)
        throw std::invalid_argument("band_from_threshold: series length != n");
    if (target == CalibTarget::REGION)
        throw std::invalid_argument("band_from_threshold: target must be a band");
    if (threshold < 0.0 || threshold > 1.0)
        throw std::invalid_argument("band_from_threshold: threshold must be in [0, 1]");

    CalibratedBand band;
    band.target = target;
    band.n = spec.n;
    band.threshold = threshold;
    const double root_l = std::sqrt(static_cast<double>(spec.l));

    if (target == CalibTarget::CDF_BAND) {
        band.grid = sorted_distinct(ts, 0, spec.n);
        band.center = eval_on_grid(ecdf(ts, 0, spec.n, band.grid), band.grid);
        std::vector<double> full_sorted(ts.begin(), ts.end());
        std::sort(full_sorted.begin(), full_sorted.end());
        std::vector<double> seg;
        band.stats.reserve(spec.num_starts());
        for (std::size_t t = 0; t < spec.num_starts(); ++t) {
            seg.assign(ts.begin() + static_cast<std::ptrdiff_t>(t),
                       ts.begin() + static_cast<std::ptrdiff_t>(t + spec.l));
            std::sort(seg.begin(), seg.end());
            band.stats.push_back(root_l * ecdf_sup_distance(seg, full_sorted));
        }
    } else {
        if (spec.l < 2)
            throw std::invalid_argument("band_from_threshold: spectral band needs l >= 2");
        const StepFunction full = spectral_distribution(ts, 0, spec.n, true);
        band.grid = full.grid;
        band.center = full.value;
        band.stats.reserve(spec.num_starts());
        for (std::size_t t = 0; t < spec.num_starts(); ++t) {
            const auto seg =
                eval_on_grid(spectral_distribution(ts, t, spec.l, true), band.grid);
            band.stats.push_back(root_l * max_abs_diff(seg, band.center));
        }
    }
    std::sort(band.stats.begin(), band.stats.end());
    band.radius = invert_radius(band.stats, spec.n, threshold);
    return band;
}

CalibratedBand calibrated_band(std::span<const double> ts, const BlockSpec& spec,
                               CalibTarget target, double alpha, std::size_t n_prime) {
    const double c = calibrated_threshold(
        second_stage_pvalues(ts, spec, n_prime, target, Estimator::mean()), alpha);
    return band_from_threshold(ts, spec, target, c);
}

BsSelection bickel_sakov_select(std::span<const double> ts, const BlockSpec& spec,
                                std::size_t K1, std::size_t K2, double g,
                                CalibTarget target, const Estimator& est) {
    validate(spec);
    if (ts.size() != spec.n)
        throw std::invalid_argument("bickel_sakov_select: series length != n");
    if (!(g > 0.0 && g < 1.0))
        throw std::invalid_argument("bickel_sakov_select: g must be in (0, 1)");
    if (K1 < 2 || K1 >= K2)
        throw std::invalid_argument("bickel_sakov_select: need 2 <= K1 < K2");
    if (K2 >= spec.n)
        throw std::invalid_argument("bickel_sakov_select: K2 must be below n");

    BsSelection sel;
    double v = static_cast<double>(K2);
    while (v >= static_cast<double>(K1)) {
        sel.candidates.push_back(static_cast<std::size_t>(std::floor(v)));
        v *= g;
    }
    if (sel.candidates.size() < 2)
        throw std::invalid_argument("bickel_sakov_select: fewer than two candidates");

    std::vector<std::vector<double>> dists(sel.candidates.size());
    for (std::size_t i = 0; i < sel.candidates.size(); ++i) {
        dists[i] = second_stage_pvalues(ts, spec, sel.candidates[i], target, est);
        std::sort(dists[i].begin(), dists[i].end());
    }
    sel.distances.resize(sel.candidates.size() - 1);
    for (std::size_t i = 0; i + 1 < sel.candidates.size(); ++i)
        sel.distances[i] = ecdf_sup_distance(dists[i], dists[i + 1]);

    sel.pair_index = 0;
    for (std::size_t i = 1; i < sel.distances.size(); ++i)
        if (sel.distances[i] < sel.distances[sel.pair_index]) sel.pair_index = i;
    sel.selected = sel.candidates[sel.pair_index + 1];
    return sel;
}

} // namespace fixedb
