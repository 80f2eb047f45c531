// Brute-force reference implementations used only by the tests. These are
// written independently of the library code paths they check: estimators are
// re-evaluated with local loops, the subsampling p-value is a direct count
// over windows, and the bootstrap enumeration walks an explicit odometer
// instead of recursing.
#pragma once

#include "fixedb/estimators.hpp"
#include "fixedb/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace oracle {

inline double eval_component(const fixedb::EstimatorComponent& c,
                             std::vector<double> xs) {
    using fixedb::EstimatorKind;
    switch (c.kind) {
    case EstimatorKind::MEAN: {
        double s = 0.0;
        for (double x : xs) s += x;
        return s / static_cast<double>(xs.size());
    }
    case EstimatorKind::MEDIAN: {
        std::sort(xs.begin(), xs.end());
        const std::size_t m = xs.size();
        return m % 2 == 1 ? xs[m / 2] : 0.5 * (xs[m / 2 - 1] + xs[m / 2]);
    }
    case EstimatorKind::TRIMMED_MEAN: {
        std::sort(xs.begin(), xs.end());
        const auto drop = static_cast<std::size_t>(
            std::floor(c.gamma * static_cast<double>(xs.size())));
        double s = 0.0;
        std::size_t kept = 0;
        for (std::size_t i = drop; i + drop < xs.size(); ++i) {
            s += xs[i];
            ++kept;
        }
        return s / static_cast<double>(kept);
    }
    }
    throw std::logic_error("unreachable");
}

inline std::vector<double> eval_estimator(const fixedb::Estimator& est,
                                          const std::vector<double>& xs) {
    std::vector<double> out;
    for (const auto& c : est.components) out.push_back(eval_component(c, xs));
    return out;
}

// Signed deviation for scalar kinds, Euclidean norm otherwise.
inline double deviation(fixedb::PValueKind kind, const std::vector<double>& a,
                        const std::vector<double>& b) {
    using fixedb::PValueKind;
    if (kind == PValueKind::UPPER || kind == PValueKind::LOWER)
        return a.at(0) - b.at(0);
    double ss = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) ss += (a[i] - b[i]) * (a[i] - b[i]);
    const double norm = std::sqrt(ss);
    return norm; // SYMMETRIC with k=1 reduces to |a-b|
}

inline bool counts_as_extreme(fixedb::PValueKind kind, double resampled,
                              double observed) {
    if (kind == fixedb::PValueKind::LOWER) return observed >= resampled;
    return resampled >= observed;
}

struct Frac {
    std::uint64_t num = 0;
    std::uint64_t den = 0;
};

inline Frac ss_pvalue(const std::vector<double>& ts, std::size_t l,
                      const fixedb::Estimator& est,
                      const std::vector<double>& theta0,
                      fixedb::PValueKind kind) {
    const std::size_t n = ts.size();
    const std::size_t N = n - l + 1;
    const std::vector<double> full = eval_estimator(est, ts);
    const double obs =
        std::sqrt(static_cast<double>(n)) * deviation(kind, full, theta0);
    Frac out{0, N};
    for (std::size_t t = 0; t < N; ++t) {
        const std::vector<double> window(ts.begin() + static_cast<long>(t),
                                         ts.begin() + static_cast<long>(t + l));
        const std::vector<double> we = eval_estimator(est, window);
        const double stat =
            std::sqrt(static_cast<double>(l)) * deviation(kind, we, full);
        if (counts_as_extreme(kind, stat, obs)) ++out.num;
    }
    return out;
}

inline std::uint64_t mbb_total(std::size_t n, std::size_t l) {
    const std::uint64_t N = n - l + 1;
    const std::size_t k = n / l;
    const std::size_t r = n - k * l;
    std::uint64_t total = 1;
    for (std::size_t j = 0; j < k; ++j) total *= N;
    if (r > 0) total *= static_cast<std::uint64_t>(n - r + 1);
    return total;
}

// Every bootstrap pseudo-series, visited by incrementing a mixed-radix
// odometer: k digits in base N for the whole blocks plus one digit for the
// fragment start when n is not a multiple of l.
inline Frac mbb_exact(const std::vector<double>& ts, std::size_t l,
                      const fixedb::Estimator& est,
                      const std::vector<double>& theta0,
                      fixedb::PValueKind kind) {
    const std::size_t n = ts.size();
    const std::size_t N = n - l + 1;
    const std::size_t k = n / l;
    const std::size_t r = n - k * l;
    const std::size_t fstarts = r > 0 ? n - r + 1 : 1;

    const std::vector<double> full = eval_estimator(est, ts);
    const double obs =
        std::sqrt(static_cast<double>(n)) * deviation(kind, full, theta0);

    std::vector<std::size_t> digits(k + 1, 0); // digits[k] is the fragment start
    std::vector<double> pseudo(n);
    Frac out{0, mbb_total(n, l)};
    for (;;) {
        std::size_t pos = 0;
        for (std::size_t j = 0; j < k; ++j)
            for (std::size_t i = 0; i < l; ++i) pseudo[pos++] = ts[digits[j] + i];
        for (std::size_t i = 0; i < r; ++i) pseudo[pos++] = ts[digits[k] + i];
        const std::vector<double> pe = eval_estimator(est, pseudo);
        const double stat =
            std::sqrt(static_cast<double>(n)) * deviation(kind, pe, full);
        if (counts_as_extreme(kind, stat, obs)) ++out.num;

        std::size_t d = 0;
        for (; d <= k; ++d) {
            const std::size_t base = d < k ? N : fstarts;
            if (++digits[d] < base) break;
            digits[d] = 0;
        }
        if (d > k) break;
    }
    return out;
}

} // namespace oracle
