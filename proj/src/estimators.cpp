#include "fixedb/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace fixedb {

Estimator Estimator::mean() { return {{{EstimatorKind::MEAN, 0.0}}}; }
Estimator Estimator::median() { return {{{EstimatorKind::MEDIAN, 0.0}}}; }
Estimator Estimator::trimmed_mean(double gamma) { return {{{EstimatorKind::TRIMMED_MEAN, gamma}}}; }
Estimator Estimator::mean_and_median() {
    return {{{EstimatorKind::MEAN, 0.0}, {EstimatorKind::MEDIAN, 0.0}}};
}

void validate(const Estimator& est) {
    if (est.components.empty())
        throw std::invalid_argument("Estimator: needs at least one component");
    for (const auto& c : est.components) {
        if (c.kind == EstimatorKind::TRIMMED_MEAN && !(c.gamma >= 0.0 && c.gamma < 0.5))
            throw std::invalid_argument("Estimator: trimming proportion must be in [0, 0.5)");
    }
}

namespace {

void check_window(std::span<const double> ts, std::size_t start, std::size_t len) {
    if (len == 0) throw std::invalid_argument("window length must be positive");
    if (start > ts.size() || len > ts.size() - start)
        throw std::out_of_range("window exceeds series bounds");
}

double mean_of(std::span<const double> seg) {
    return std::accumulate(seg.begin(), seg.end(), 0.0) / static_cast<double>(seg.size());
}

double component_estimate(const EstimatorComponent& c, std::span<const double> seg,
                          std::vector<double>& sorted_buf) {
    const std::size_t len = seg.size();
    switch (c.kind) {
    case EstimatorKind::MEAN:
        return mean_of(seg);
    case EstimatorKind::MEDIAN: {
        if (sorted_buf.empty()) {
            sorted_buf.assign(seg.begin(), seg.end());
            std::sort(sorted_buf.begin(), sorted_buf.end());
        }
        if (len % 2 == 1) return sorted_buf[len / 2];
        return 0.5 * (sorted_buf[len / 2 - 1] + sorted_buf[len / 2]);
    }
    case EstimatorKind::TRIMMED_MEAN: {
        if (sorted_buf.empty()) {
            sorted_buf.assign(seg.begin(), seg.end());
            std::sort(sorted_buf.begin(), sorted_buf.end());
        }
        const std::size_t drop = static_cast<std::size_t>(
            std::floor(c.gamma * static_cast<double>(len)));
        const std::size_t kept = len - 2 * drop;
        double s = 0.0;
        for (std::size_t i = drop; i < len - drop; ++i) s += sorted_buf[i];
        return s / static_cast<double>(kept);
    }
    }
    throw std::logic_error("unreachable estimator kind");
}

} // namespace

std::vector<double> point_estimate(std::span<const double> ts, std::size_t start,
                                   std::size_t len, const Estimator& est) {
    validate(est);
    check_window(ts, start, len);
    auto seg = ts.subspan(start, len);
    std::vector<double> sorted_buf; // filled lazily, shared by order-statistic components
    std::vector<double> out;
    out.reserve(est.components.size());
    for (const auto& c : est.components) out.push_back(component_estimate(c, seg, sorted_buf));
    return out;
}

double StepFunction::operator()(double x) const {
    auto it = std::upper_bound(grid.begin(), grid.end(), x);
    if (it == grid.begin()) return 0.0;
    return value[static_cast<std::size_t>(it - grid.begin()) - 1];
}

StepFunction ecdf(std::span<const double> ts, std::size_t start, std::size_t len,
                  std::vector<double> grid) {
    check_window(ts, start, len);
    if (grid.empty()) throw std::invalid_argument("ecdf: empty grid");
    if (!std::is_sorted(grid.begin(), grid.end()))
        throw std::invalid_argument("ecdf: grid must be sorted");
    std::vector<double> seg(ts.begin() + static_cast<std::ptrdiff_t>(start),
                            ts.begin() + static_cast<std::ptrdiff_t>(start + len));
    std::sort(seg.begin(), seg.end());
    StepFunction f;
    f.value.reserve(grid.size());
    for (double g : grid) {
        auto le = std::upper_bound(seg.begin(), seg.end(), g) - seg.begin();
        f.value.push_back(static_cast<double>(le) / static_cast<double>(len));
    }
    f.grid = std::move(grid);
    return f;
}

StepFunction periodogram(std::span<const double> ts, std::size_t start, std::size_t len) {
    check_window(ts, start, len);
    if (len < 2) throw std::invalid_argument("periodogram: window length must be at least 2");
    auto seg = ts.subspan(start, len);
    const double m = mean_of(seg);
    const std::size_t half = len / 2;
    StepFunction f;
    f.grid.reserve(half);
    f.value.reserve(half);
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t s = 1; s <= half; ++s) {
        const double w = two_pi * static_cast<double>(s) / static_cast<double>(len);
        double re = 0.0, im = 0.0;
        for (std::size_t j = 0; j < len; ++j) {
            const double c = seg[j] - m;
            re += c * std::cos(w * static_cast<double>(j));
            im += c * std::sin(w * static_cast<double>(j));
        }
        f.grid.push_back(w);
        f.value.push_back((re * re + im * im) / (two_pi * static_cast<double>(len)));
    }
    return f;
}

StepFunction spectral_distribution(std::span<const double> ts, std::size_t start,
                                   std::size_t len, bool normalized) {
    StepFunction pg = periodogram(ts, start, len);
    StepFunction f;
    f.grid = pg.grid;
    f.value.resize(pg.value.size());
    const double scale = 2.0 * std::numbers::pi / static_cast<double>(len);
    double acc = 0.0;
    for (std::size_t i = 0; i < pg.value.size(); ++i) {
        acc += scale * pg.value[i];
        f.value[i] = acc;
    }
    if (len % 2 == 1) { // Fourier grid stops short of pi for odd len
        f.grid.push_back(std::numbers::pi);
        f.value.push_back(acc);
    }
    if (normalized) {
        const double total = f.value.back();
        if (!(total > 0.0))
            throw std::domain_error("spectral_distribution: cannot normalize, F(pi) = 0");
        for (double& v : f.value) v /= total;
    }
    return f;
}

double sup_distance(const StepFunction& f, const StepFunction& g,
                    std::span<const double> grid) {
    if (grid.empty()) throw std::invalid_argument("sup_distance: empty grid");
    double best = 0.0;
    for (double x : grid) best = std::max(best, std::abs(f(x) - g(x)));
    return best;
}

double ecdf_sup_distance(std::span<const double> sorted_a, std::span<const double> sorted_b) {
    if (sorted_a.empty() || sorted_b.empty())
        throw std::invalid_argument("ecdf_sup_distance: empty sample");
    const double na = static_cast<double>(sorted_a.size());
    const double nb = static_cast<double>(sorted_b.size());
    std::size_t i = 0, j = 0;
    double best = 0.0;
    while (i < sorted_a.size() || j < sorted_b.size()) {
        double x;
        if (j >= sorted_b.size() || (i < sorted_a.size() && sorted_a[i] <= sorted_b[j]))
            x = sorted_a[i];
        else
            x = sorted_b[j];
        while (i < sorted_a.size() && sorted_a[i] <= x) ++i;
        while (j < sorted_b.size() && sorted_b[j] <= x) ++j;
        best = std::max(best, std::abs(static_cast<double>(i) / na -
                                       static_cast<double>(j) / nb));
    }
    return best;
}

std::vector<double> sorted_distinct(std::span<const double> ts, std::size_t start,
                                    std::size_t len) {
    check_window(ts, start, len);
    std::vector<double> out(ts.begin() + static_cast<std::ptrdiff_t>(start),
                            ts.begin() + static_cast<std::ptrdiff_t>(start + len));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<double> eval_on_grid(const StepFunction& f, std::span<const double> grid) {
    std::vector<double> out;
    out.reserve(grid.size());
    for (double x : grid) out.push_back(f(x));
    return out;
}

} // namespace fixedb
