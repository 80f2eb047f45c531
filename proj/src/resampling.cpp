#include "fixedb/resampling.hpp"

#include "fixedb/fixedb_limits.hpp"
#include "fixedb/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fixedb {

namespace {

constexpr double kIndexEps = 1e-9; // guards ceil() against representation error

std::size_t order_index(double q, std::size_t count) {
    double raw = std::ceil(q * static_cast<double>(count) - kIndexEps);
    if (raw < 1.0) raw = 1.0;
    auto idx = static_cast<std::size_t>(raw);
    if (idx > count) idx = count;
    return idx;
}

double norm2(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

void require_scalar(const Estimator& est, PValueKind kind) {
    if (kind != PValueKind::VECTOR_NORM && est.dim() != 1)
        throw std::invalid_argument("signed and symmetric statistics need a scalar estimator");
}

// Signed (UPPER/LOWER), absolute (SYMMETRIC) or norm (VECTOR_NORM) distance
// between an estimate and a reference, before the sqrt(len) scaling.
double raw_stat(std::span<const double> est, std::span<const double> ref, PValueKind kind) {
    switch (kind) {
    case PValueKind::UPPER:
    case PValueKind::LOWER:
        return est[0] - ref[0];
    case PValueKind::SYMMETRIC:
        return std::abs(est[0] - ref[0]);
    case PValueKind::VECTOR_NORM:
        return norm2(est, ref);
    }
    throw std::logic_error("unreachable p-value kind");
}

bool extreme(double observed, double resampled, PValueKind kind) {
    if (kind == PValueKind::LOWER) return observed >= resampled;
    return observed <= resampled;
}

} // namespace

void validate(const BlockSpec& spec) {
    if (spec.n < 2) throw std::invalid_argument("BlockSpec: n must be at least 2");
    if (spec.l < 1 || spec.l > spec.n)
        throw std::invalid_argument("BlockSpec: block length must satisfy 1 <= l <= n");
}

double empirical_quantile(const EmpiricalDist& dist, double q) {
    if (dist.values.empty()) throw std::invalid_argument("empirical_quantile: empty distribution");
    if (!(q > 0.0 && q <= 1.0))
        throw std::invalid_argument("empirical_quantile: q must be in (0, 1]");
    return dist.values[order_index(q, dist.values.size()) - 1];
}

EmpiricalDist subsample_stats(std::span<const double> ts, const BlockSpec& spec,
                              const Estimator& est, PValueKind kind) {
    validate(spec);
    require_scalar(est, kind);
    if (ts.size() != spec.n) throw std::invalid_argument("subsample_stats: series length != n");
    const auto full = point_estimate(ts, 0, spec.n, est);
    const double root_l = std::sqrt(static_cast<double>(spec.l));
    EmpiricalDist dist;
    dist.values.reserve(spec.num_starts());
    for (std::size_t t = 0; t < spec.num_starts(); ++t) {
        const auto sub = point_estimate(ts, t, spec.l, est);
        dist.values.push_back(root_l * raw_stat(sub, full, kind));
    }
    std::sort(dist.values.begin(), dist.values.end());
    return dist;
}

Rational subsample_pvalue(std::span<const double> ts, const BlockSpec& spec,
                          const Estimator& est, std::span<const double> theta0,
                          PValueKind kind) {
    validate(spec);
    require_scalar(est, kind);
    if (ts.size() != spec.n) throw std::invalid_argument("subsample_pvalue: series length != n");
    if (theta0.size() != est.dim())
        throw std::invalid_argument("subsample_pvalue: theta0 dimension mismatch");
    const auto full = point_estimate(ts, 0, spec.n, est);
    const double observed =
        std::sqrt(static_cast<double>(spec.n)) * raw_stat(full, theta0, kind);
    const double root_l = std::sqrt(static_cast<double>(spec.l));
    std::uint64_t hits = 0;
    for (std::size_t t = 0; t < spec.num_starts(); ++t) {
        const auto sub = point_estimate(ts, t, spec.l, est);
        if (extreme(observed, root_l * raw_stat(sub, full, kind), kind)) ++hits;
    }
    return {hits, spec.num_starts()};
}

Series mbb_resample(std::span<const double> ts, const BlockSpec& spec,
                    std::mt19937_64& engine) {
    validate(spec);
    if (ts.size() != spec.n) throw std::invalid_argument("mbb_resample: series length != n");
    const std::size_t whole = spec.n / spec.l;
    const std::size_t frag = spec.n - whole * spec.l;
    Series out;
    out.reserve(spec.n);
    std::uniform_int_distribution<std::size_t> start(0, spec.num_starts() - 1);
    for (std::size_t k = 0; k < whole; ++k) {
        const std::size_t s = start(engine);
        out.insert(out.end(), ts.begin() + static_cast<std::ptrdiff_t>(s),
                   ts.begin() + static_cast<std::ptrdiff_t>(s + spec.l));
    }
    if (frag > 0) {
        std::uniform_int_distribution<std::size_t> fstart(0, spec.n - frag);
        const std::size_t s = fstart(engine);
        out.insert(out.end(), ts.begin() + static_cast<std::ptrdiff_t>(s),
                   ts.begin() + static_cast<std::ptrdiff_t>(s + frag));
    }
    return out;
}

Rational mbb_pvalue(std::span<const double> ts, const BlockSpec& spec,
                    const Estimator& est, std::span<const double> theta0,
                    PValueKind kind, std::size_t B, std::uint64_t seed) {
    validate(spec);
    require_scalar(est, kind);
    if (B == 0) throw std::invalid_argument("mbb_pvalue: B must be positive");
    if (theta0.size() != est.dim())
        throw std::invalid_argument("mbb_pvalue: theta0 dimension mismatch");
    const auto full = point_estimate(ts, 0, spec.n, est);
    const double root_n = std::sqrt(static_cast<double>(spec.n));
    const double observed = root_n * raw_stat(full, theta0, kind);
    std::uint64_t hits = 0;
    for (std::size_t i = 0; i < B; ++i) {
        auto engine = rng::make_engine(seed, i);
        const Series pseudo = mbb_resample(ts, spec, engine);
        const auto boot = point_estimate(pseudo, 0, spec.n, est);
        if (extreme(observed, root_n * raw_stat(boot, full, kind), kind)) ++hits;
    }
    return {hits, B};
}

std::uint64_t mbb_enumeration_count(const BlockSpec& spec) {
    const std::size_t whole = spec.n / spec.l;
    const std::size_t frag = spec.n - whole * spec.l;
    std::uint64_t total = 1;
    for (std::size_t k = 0; k < whole; ++k) {
        if (total > std::numeric_limits<std::uint64_t>::max() / spec.num_starts()) return 0;
        total *= spec.num_starts();
    }
    if (frag > 0) {
        const auto fstarts = static_cast<std::uint64_t>(spec.n - frag + 1);
        if (total > std::numeric_limits<std::uint64_t>::max() / fstarts) return 0;
        total *= fstarts;
    }
    return total;
}

Rational mbb_pvalue_exact(std::span<const double> ts, const BlockSpec& spec,
                          const Estimator& est, std::span<const double> theta0,
                          PValueKind kind) {
    validate(spec);
    require_scalar(est, kind);
    if (spec.n > 12) throw std::invalid_argument("mbb_pvalue_exact: only supported for n <= 12");
    if (theta0.size() != est.dim())
        throw std::invalid_argument("mbb_pvalue_exact: theta0 dimension mismatch");
    const std::uint64_t total = mbb_enumeration_count(spec);
    if (total == 0 || total > 100'000'000ULL)
        throw std::invalid_argument("mbb_pvalue_exact: enumeration too large");

    const auto full = point_estimate(ts, 0, spec.n, est);
    const double root_n = std::sqrt(static_cast<double>(spec.n));
    const double observed = root_n * raw_stat(full, theta0, kind);

    const std::size_t whole = spec.n / spec.l;
    const std::size_t frag = spec.n - whole * spec.l;
    const std::size_t nstarts = spec.num_starts();
    const std::size_t fstarts = frag > 0 ? spec.n - frag + 1 : 1;

    Series pseudo(spec.n);
    std::uint64_t hits = 0;

    // Depth-first walk over every tuple of block starts; the buffer holds
    // the partially assembled pseudo-series.
    auto leaf = [&](void) {
        const auto boot = point_estimate(pseudo, 0, spec.n, est);
        if (extreme(observed, root_n * raw_stat(boot, full, kind), kind)) ++hits;
    };
    auto walk = [&](auto&& self, std::size_t depth) -> void {
        if (depth == whole) {
            if (frag == 0) {
                leaf();
                return;
            }
            for (std::size_t s = 0; s < fstarts; ++s) {
                std::copy_n(ts.begin() + static_cast<std::ptrdiff_t>(s), frag,
                            pseudo.begin() + static_cast<std::ptrdiff_t>(whole * spec.l));
                leaf();
            }
            return;
        }
        for (std::size_t s = 0; s < nstarts; ++s) {
            std::copy_n(ts.begin() + static_cast<std::ptrdiff_t>(s), spec.l,
                        pseudo.begin() + static_cast<std::ptrdiff_t>(depth * spec.l));
            self(self, depth + 1);
        }
    };
    walk(walk, 0);
    return {hits, total};
}

Interval build_ci(std::span<const double> ts, const BlockSpec& spec,
                  const Estimator& est, const CiOptions& opt) {
    validate(spec);
    if (est.dim() != 1) throw std::invalid_argument("build_ci: estimator must be scalar");
    if (!(opt.alpha > 0.0 && opt.alpha < 1.0))
        throw std::invalid_argument("build_ci: alpha must be in (0, 1)");

    // Nominal tail levels, possibly replaced by the limiting-null levels.
    const double tail_alpha =
        opt.shape == CiShape::EQUAL_TAILED ? opt.alpha / 2.0 : opt.alpha;
    double level = tail_alpha;
    if (opt.calibration == CiCalibration::FIXED_B) {
        CvKind kind;
        if (opt.method == CiMethod::SS)
            kind = opt.shape == CiShape::SYMMETRIC ? CvKind::GTILDE : CvKind::G;
        else
            kind = opt.shape == CiShape::SYMMETRIC ? CvKind::HTILDE : CvKind::H;
        level = cv_lookup(kind, tail_alpha, spec.b());
    }

    const PValueKind stat_kind =
        opt.shape == CiShape::SYMMETRIC ? PValueKind::SYMMETRIC : PValueKind::UPPER;
    EmpiricalDist dist;
    if (opt.method == CiMethod::SS) {
        dist = subsample_stats(ts, spec, est, stat_kind);
    } else {
        if (opt.B == 0) throw std::invalid_argument("build_ci: B must be positive");
        const auto full = point_estimate(ts, 0, spec.n, est);
        const double root_n = std::sqrt(static_cast<double>(spec.n));
        dist.values.reserve(opt.B);
        for (std::size_t i = 0; i < opt.B; ++i) {
            auto engine = rng::make_engine(opt.seed, i);
            const Series pseudo = mbb_resample(ts, spec, engine);
            const auto boot = point_estimate(pseudo, 0, spec.n, est);
            dist.values.push_back(root_n * raw_stat(boot, full, stat_kind));
        }
        std::sort(dist.values.begin(), dist.values.end());
    }

    const double center = point_estimate(ts, 0, spec.n, est)[0];
    const double root_n = std::sqrt(static_cast<double>(spec.n));
    const double inf = std::numeric_limits<double>::infinity();
    switch (opt.shape) {
    case CiShape::ONE_SIDED_UPPER:
        return {center - empirical_quantile(dist, 1.0 - level) / root_n, inf};
    case CiShape::ONE_SIDED_LOWER:
        return {-inf, center - empirical_quantile(dist, level) / root_n};
    case CiShape::EQUAL_TAILED:
        return {center - empirical_quantile(dist, 1.0 - level) / root_n,
                center - empirical_quantile(dist, level) / root_n};
    case CiShape::SYMMETRIC: {
        const double half = empirical_quantile(dist, 1.0 - level) / root_n;
        return {center - half, center + half};
    }
    }
    throw std::logic_error("unreachable interval shape");
}

} // namespace fixedb
