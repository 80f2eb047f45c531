#include "fixedb/fixedb_limits.hpp"

#include "fixedb/parallel.hpp"
#include "fixedb/resampling.hpp"
#include "fixedb/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fixedb {

namespace {

void check_sim_config(const LimitSimConfig& cfg, double b) {
    if (cfg.paths == 0 || cfg.grid_n == 0)
        throw std::invalid_argument("limit simulation: paths and grid_n must be positive");
    if (!(b > 0.0 && b < 1.0))
        throw std::invalid_argument("limit simulation: b must be in (0, 1)");
    if (b * static_cast<double>(cfg.grid_n) < 1.0)
        throw std::invalid_argument("limit simulation: grid too coarse for this b");
}

// Partial sums S_0..S_grid of iid standard normals; W(i/grid) = S_i/sqrt(grid).
void fill_partial_sums(std::mt19937_64& engine, std::vector<double>& sums) {
    std::normal_distribution<double> normal(0.0, 1.0);
    double acc = 0.0;
    sums[0] = 0.0;
    for (std::size_t i = 1; i < sums.size(); ++i) {
        acc += normal(engine);
        sums[i] = acc;
    }
}

std::size_t block_steps(double b, std::size_t grid_n) {
    auto block = static_cast<std::size_t>(std::llround(b * static_cast<double>(grid_n)));
    return block == 0 ? 1 : block;
}

} // namespace

LimitSimConfig desk_preset(std::uint64_t seed) {
    LimitSimConfig cfg;
    cfg.paths = 10000;
    cfg.grid_n = 2000;
    cfg.boot_draws = 10000;
    cfg.seed = seed;
    return cfg;
}

LimitSamplePair simulate_sub_limit_pair(double b, const LimitSimConfig& cfg) {
    check_sim_config(cfg, b);
    const std::size_t block = block_steps(b, cfg.grid_n);
    const std::size_t last_start = cfg.grid_n - block; // floor((1-b)*grid) when b*grid is whole
    const double root_grid = std::sqrt(static_cast<double>(cfg.grid_n));
    const double root_b = std::sqrt(b);

    LimitSamplePair out;
    out.one_sided.resize(cfg.paths);
    out.symmetric.resize(cfg.paths);
    parallel_for(cfg.paths, cfg.threads, [&](std::size_t p) {
        std::vector<double> sums(cfg.grid_n + 1);
        auto engine = rng::make_engine(cfg.seed, p);
        fill_partial_sums(engine, sums);
        const double w1 = sums[cfg.grid_n] / root_grid;
        const double abs_w1 = std::abs(w1);
        std::size_t one = 0, sym = 0;
        for (std::size_t i = 0; i <= last_start; ++i) {
            const double incr = (sums[i + block] - sums[i]) / root_grid;
            const double d = (incr - b * w1) / root_b;
            if (w1 <= d) ++one;
            if (abs_w1 <= std::abs(d)) ++sym;
        }
        const double denom = static_cast<double>(last_start + 1);
        out.one_sided[p] = static_cast<double>(one) / denom;
        out.symmetric[p] = static_cast<double>(sym) / denom;
    });
    return out;
}

LimitSamplePair simulate_boot_limit_pair(double b, const LimitSimConfig& cfg) {
    check_sim_config(cfg, b);
    if (cfg.boot_draws == 0)
        throw std::invalid_argument("limit simulation: boot_draws must be positive");
    const double ratio = 1.0 / b;
    const auto r_b = static_cast<std::size_t>(std::llround(ratio));
    if (std::abs(ratio - static_cast<double>(r_b)) > 1e-9)
        throw std::invalid_argument("bootstrap limit: 1/b must be an integer");
    const std::size_t block = block_steps(b, cfg.grid_n);
    const std::size_t last_start = cfg.grid_n - block;
    const double root_grid = std::sqrt(static_cast<double>(cfg.grid_n));

    LimitSamplePair out;
    out.one_sided.resize(cfg.paths);
    out.symmetric.resize(cfg.paths);
    parallel_for(cfg.paths, cfg.threads, [&](std::size_t p) {
        std::vector<double> sums(cfg.grid_n + 1);
        auto engine = rng::make_engine(cfg.seed, p);
        fill_partial_sums(engine, sums);
        const double w1 = sums[cfg.grid_n] / root_grid;
        const double abs_w1 = std::abs(w1);
        // Inner Monte Carlo over block-start tuples: each draw places r_b
        // blocks uniformly on [0, 1-b] and sums their increments.
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const double span = static_cast<double>(last_start);
        std::size_t one = 0, sym = 0;
        for (std::size_t d = 0; d < cfg.boot_draws; ++d) {
            double total = 0.0;
            for (std::size_t h = 0; h < r_b; ++h) {
                const auto idx = static_cast<std::size_t>(unif(engine) * span);
                total += sums[idx + block] - sums[idx];
            }
            total /= root_grid;
            if (total >= 2.0 * w1) ++one;
            if (std::abs(total - w1) >= abs_w1) ++sym;
        }
        const double denom = static_cast<double>(cfg.boot_draws);
        out.one_sided[p] = static_cast<double>(one) / denom;
        out.symmetric[p] = static_cast<double>(sym) / denom;
    });
    return out;
}

std::vector<double> simulate_G_samples(double b, CvKind kind, const LimitSimConfig& cfg) {
    if (kind != CvKind::G && kind != CvKind::GTILDE)
        throw std::invalid_argument("simulate_G_samples: kind must be G or GTILDE");
    auto pair = simulate_sub_limit_pair(b, cfg);
    return kind == CvKind::G ? std::move(pair.one_sided) : std::move(pair.symmetric);
}

std::vector<double> simulate_H_samples(double b, CvKind kind, const LimitSimConfig& cfg) {
    if (kind != CvKind::H && kind != CvKind::HTILDE)
        throw std::invalid_argument("simulate_H_samples: kind must be H or HTILDE");
    auto pair = simulate_boot_limit_pair(b, cfg);
    return kind == CvKind::H ? std::move(pair.one_sided) : std::move(pair.symmetric);
}

namespace {

double sample_quantile(std::vector<double> values, double alpha) {
    std::sort(values.begin(), values.end());
    EmpiricalDist dist{std::move(values)};
    return empirical_quantile(dist, alpha);
}

} // namespace

double simulate_G(double b, double alpha, CvKind kind, const LimitSimConfig& cfg) {
    return sample_quantile(simulate_G_samples(b, kind, cfg), alpha);
}

double simulate_H(double b, double alpha, CvKind kind, const LimitSimConfig& cfg) {
    return sample_quantile(simulate_H_samples(b, kind, cfg), alpha);
}

namespace {

// Lower Cholesky factor of a k x k SPD matrix, row-major.
std::vector<double> cholesky_lower(std::size_t k, std::span<const double> sigma) {
    if (sigma.size() != k * k)
        throw std::invalid_argument("simulate_Gk_sample: sigma must be k x k");
    std::vector<double> L(k * k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = sigma[i * k + j];
            for (std::size_t m = 0; m < j; ++m) s -= L[i * k + m] * L[j * k + m];
            if (i == j) {
                if (!(s > 0.0))
                    throw std::invalid_argument("simulate_Gk_sample: sigma is not positive definite");
                L[i * k + i] = std::sqrt(s);
            } else {
                L[i * k + j] = s / L[j * k + j];
            }
        }
        for (std::size_t j = i + 1; j < k; ++j) {
            if (sigma[i * k + j] != sigma[j * k + i])
                throw std::invalid_argument("simulate_Gk_sample: sigma must be symmetric");
        }
    }
    return L;
}

} // namespace

std::vector<double> simulate_Gk_sample(double b, std::size_t k,
                                       std::span<const double> sigma,
                                       const LimitSimConfig& cfg) {
    check_sim_config(cfg, b);
    if (k == 0) throw std::invalid_argument("simulate_Gk_sample: k must be positive");
    const std::vector<double> L = cholesky_lower(k, sigma);
    const std::size_t block = block_steps(b, cfg.grid_n);
    const std::size_t last_start = cfg.grid_n - block;
    const double root_grid = std::sqrt(static_cast<double>(cfg.grid_n));
    const double root_b = std::sqrt(b);

    std::vector<double> out(cfg.paths);
    parallel_for(cfg.paths, cfg.threads, [&](std::size_t p) {
        // k coordinate paths stored contiguously per coordinate; normals are
        // consumed step-major so the draw order is documented and fixed.
        std::vector<double> sums(k * (cfg.grid_n + 1));
        auto engine = rng::make_engine(cfg.seed, p);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (std::size_t c = 0; c < k; ++c) sums[c * (cfg.grid_n + 1)] = 0.0;
        for (std::size_t i = 1; i <= cfg.grid_n; ++i)
            for (std::size_t c = 0; c < k; ++c) {
                double* s = &sums[c * (cfg.grid_n + 1)];
                s[i] = s[i - 1] + normal(engine);
            }

        std::vector<double> w1(k), d(k), tmp(k);
        for (std::size_t c = 0; c < k; ++c)
            w1[c] = sums[c * (cfg.grid_n + 1) + cfg.grid_n] / root_grid;
        double ref2 = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            double v = 0.0;
            for (std::size_t j = 0; j <= i; ++j) v += L[i * k + j] * w1[j];
            ref2 += v * v;
        }

        std::size_t hits = 0;
        for (std::size_t i = 0; i <= last_start; ++i) {
            for (std::size_t c = 0; c < k; ++c) {
                const double* s = &sums[c * (cfg.grid_n + 1)];
                d[c] = ((s[i + block] - s[i]) / root_grid - b * w1[c]) / root_b;
            }
            double dist2 = 0.0;
            for (std::size_t r = 0; r < k; ++r) {
                double v = 0.0;
                for (std::size_t j = 0; j <= r; ++j) v += L[r * k + j] * d[j];
                dist2 += v * v;
            }
            if (ref2 <= dist2) ++hits;
        }
        out[p] = static_cast<double>(hits) / static_cast<double>(last_start + 1);
    });
    return out;
}

CvFit fit_cv_poly(std::span<const double> b_grid, std::span<const double> cv,
                  double alpha) {
    if (b_grid.size() != cv.size())
        throw std::invalid_argument("fit_cv_poly: grid/value length mismatch");
    if (b_grid.size() < 3)
        throw std::invalid_argument("fit_cv_poly: need at least 3 grid points");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("fit_cv_poly: alpha must be in (0, 1)");

    CvFit fit;
    fit.alpha = alpha;
    fit.a0 = alpha;

    const bool constant =
        std::all_of(cv.begin(), cv.end(), [&](double v) { return v == cv[0]; });
    if (constant) return fit; // degenerate by convention: a1 = a2 = 0, r2 = 0

    // Least squares of y on columns (b, b^2) via 2-step Gram-Schmidt; better
    // conditioned than the normal equations on a narrow b range.
    const std::size_t m = b_grid.size();
    std::vector<double> x1(b_grid.begin(), b_grid.end());
    std::vector<double> x2(m);
    std::vector<double> y(m);
    for (std::size_t i = 0; i < m; ++i) {
        x2[i] = b_grid[i] * b_grid[i];
        y[i] = cv[i] - alpha;
    }
    auto dot = [m](const std::vector<double>& a, const std::vector<double>& b2) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += a[i] * b2[i];
        return s;
    };
    const double n1 = std::sqrt(dot(x1, x1));
    if (!(n1 > 0.0)) throw std::invalid_argument("fit_cv_poly: degenerate grid");
    std::vector<double> q1(m);
    for (std::size_t i = 0; i < m; ++i) q1[i] = x1[i] / n1;
    const double r12 = dot(q1, x2);
    std::vector<double> u2(m);
    for (std::size_t i = 0; i < m; ++i) u2[i] = x2[i] - r12 * q1[i];
    const double n2 = std::sqrt(dot(u2, u2));
    if (!(n2 > 1e-14 * n1))
        throw std::invalid_argument("fit_cv_poly: rank-deficient grid");
    std::vector<double> q2(m);
    for (std::size_t i = 0; i < m; ++i) q2[i] = u2[i] / n2;
    const double c2 = dot(q2, y);
    const double c1 = dot(q1, y);
    fit.a2 = c2 / n2;
    fit.a1 = (c1 - fit.a2 * r12) / n1;

    double mean_cv = 0.0;
    for (double v : cv) mean_cv += v;
    mean_cv /= static_cast<double>(m);
    double sst = 0.0, sse = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double res = cv[i] - fit(b_grid[i]);
        sse += res * res;
        const double dev = cv[i] - mean_cv;
        sst += dev * dev;
    }
    fit.r2 = 1.0 - sse / sst;
    return fit;
}

const std::vector<CvFit>& builtin_cv_table() {
    static const std::vector<CvFit> table = {
        {CvKind::G, 0.05, 0.05, -0.2289, -0.1325, 0.9980},
        {CvKind::G, 0.10, 0.10, -0.1039, -0.8407, 0.9997},
        {CvKind::GTILDE, 0.05, 0.05, -0.3929, 0.6394, 0.9978},
        {CvKind::GTILDE, 0.10, 0.10, -0.3285, -0.4088, 0.9994},
        {CvKind::H, 0.05, 0.05, -0.3431, 0.5766, 0.9868},
        {CvKind::H, 0.10, 0.10, -0.4079, 0.2256, 0.9681},
        {CvKind::HTILDE, 0.05, 0.05, -0.2121, 0.2624, 0.9610},
        {CvKind::HTILDE, 0.10, 0.10, -0.2461, 0.1174, 0.9584},
    };
    return table;
}

double cv_lookup(CvKind kind, double alpha, double b) {
    if (!(b > 0.0 && b <= 0.2))
        throw std::domain_error("cv_lookup: b must be in (0, 0.2]");
    for (const auto& fit : builtin_cv_table()) {
        if (fit.kind == kind && std::abs(fit.alpha - alpha) < 1e-12) {
            const double v = fit(b);
            if (!(v > 0.0))
                throw std::domain_error("cv_lookup: calibrated level is nonpositive at this b");
            return v;
        }
    }
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "cv_lookup: no table row for alpha = %g (stored rows: 0.05, 0.10; "
                  "equal-tailed intervals look up alpha/2)",
                  alpha);
    throw std::invalid_argument(msg);
}

std::string to_string(CvKind kind) {
    switch (kind) {
    case CvKind::G: return "G";
    case CvKind::GTILDE: return "Gtilde";
    case CvKind::H: return "H";
    case CvKind::HTILDE: return "Htilde";
    }
    return "?";
}

CvKind cv_kind_from_string(const std::string& s) {
    if (s == "G") return CvKind::G;
    if (s == "Gtilde") return CvKind::GTILDE;
    if (s == "H") return CvKind::H;
    if (s == "Htilde") return CvKind::HTILDE;
    throw std::invalid_argument("unknown limit kind: " + s);
}

void write_cv_table(std::ostream& os, std::span<const CvFit> table) {
    os << "kind,alpha,a0,a1,a2,r2\n";
    char buf[160];
    for (const auto& f : table) {
        std::snprintf(buf, sizeof buf, "%s,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                      to_string(f.kind).c_str(), f.alpha, f.a0, f.a1, f.a2, f.r2);
        os << buf;
    }
}

std::vector<CvFit> read_cv_table(std::istream& is) {
    std::vector<CvFit> table;
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (first && line.rfind("kind,", 0) == 0) {
            first = false;
            continue;
        }
        first = false;
        std::istringstream row(line);
        std::string field;
        CvFit f;
        if (!std::getline(row, field, ',')) continue;
        f.kind = cv_kind_from_string(field);
        double* slots[5] = {&f.alpha, &f.a0, &f.a1, &f.a2, &f.r2};
        for (double* slot : slots) {
            if (!std::getline(row, field, ','))
                throw std::invalid_argument("calibration table: short row: " + line);
            *slot = std::stod(field);
        }
        table.push_back(f);
    }
    return table;
}

} // namespace fixedb
