#include "fixedb/harness.hpp"

#include "fixedb/parallel.hpp"
#include "fixedb/rng.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fixedb {

namespace {

// Every long-simulation truth shares this stream; changing it would move
// the cached oracle values, so it is part of the documented contract.
constexpr std::uint64_t kOracleSeed = 0x6f7261636c65ULL;
constexpr std::size_t kOracleDraws = 10'000'000;

std::string trim_copy(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string lower_copy(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

double parse_double(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad numeric value for '" + key + "': " + v);
    }
}

std::uint64_t parse_u64(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad integer value for '" + key + "': " + v);
    }
}

std::vector<double> parse_double_list(const std::string& v, const std::string& key) {
    std::vector<double> out;
    std::istringstream is(v);
    std::string item;
    while (std::getline(is, item, ',')) {
        item = trim_copy(item);
        if (item.empty()) continue;
        out.push_back(parse_double(item, key));
    }
    if (out.empty()) throw std::invalid_argument("config: empty list for '" + key + "'");
    return out;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// --- stationary-law oracle cache -------------------------------------------

struct OracleSample {
    std::vector<double> sorted;
    double mean = 0.0;
};

const OracleSample& oracle_sample(const ModelSpec& model) {
    static std::mutex mu;
    static std::map<std::string, OracleSample> cache;
    char key[160];
    std::snprintf(key, sizeof key, "%s|%.17g|%.17g|%.17g|%s",
                  to_string(model.family).c_str(), model.rho, model.theta, model.mu,
                  to_string(model.err).c_str());
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    Series draw = gen_series(model, kOracleDraws, kOracleSeed);
    OracleSample s;
    double acc = 0.0;
    for (double x : draw) acc += x;
    s.mean = acc / static_cast<double>(draw.size());
    std::sort(draw.begin(), draw.end());
    s.sorted = std::move(draw);
    return cache.emplace(key, std::move(s)).first->second;
}

bool symmetric_marginal(const ModelSpec& model) {
    // Gaussian innovations keep the ARMA and sine recursions sign-symmetric,
    // so the stationary marginal is symmetric about mu.
    return model.err == ErrorDist::GAUSSIAN &&
           (model.family == ModelFamily::ARMA11 ||
            model.family == ModelFamily::NONLINEAR_SINE);
}

double estimate_sorted(const std::vector<double>& sorted, const EstimatorComponent& c) {
    const std::size_t len = sorted.size();
    switch (c.kind) {
    case EstimatorKind::MEAN: {
        double acc = 0.0;
        for (double x : sorted) acc += x;
        return acc / static_cast<double>(len);
    }
    case EstimatorKind::MEDIAN:
        if (len % 2 == 1) return sorted[len / 2];
        return 0.5 * (sorted[len / 2 - 1] + sorted[len / 2]);
    case EstimatorKind::TRIMMED_MEAN: {
        const auto drop =
            static_cast<std::size_t>(std::floor(c.gamma * static_cast<double>(len)));
        double acc = 0.0;
        for (std::size_t i = drop; i < len - drop; ++i) acc += sorted[i];
        return acc / static_cast<double>(len - 2 * drop);
    }
    }
    throw std::logic_error("unreachable estimator kind");
}

} // namespace

double true_scalar(const ModelSpec& model, const EstimatorComponent& c) {
    validate(model);
    if (c.kind == EstimatorKind::MEAN) {
        // Innovations are centered, so the ARMA and sine cores have mean 0.
        if (model.family != ModelFamily::TAR1) return model.mu;
        return oracle_sample(model).mean;
    }
    if (symmetric_marginal(model)) return model.mu;
    return estimate_sorted(oracle_sample(model).sorted, c);
}

std::vector<double> true_vector(const ModelSpec& model, const Estimator& est) {
    std::vector<double> out;
    out.reserve(est.components.size());
    for (const auto& c : est.components) out.push_back(true_scalar(model, c));
    return out;
}

TruthCdf::TruthCdf(const ModelSpec& model) {
    validate(model);
    if (model.family == ModelFamily::ARMA11 && model.err == ErrorDist::GAUSSIAN) {
        analytic_ = true;
        mu_ = model.mu;
        sd_ = std::sqrt((1.0 + 2.0 * model.rho * model.theta + model.theta * model.theta) /
                        (1.0 - model.rho * model.rho));
        return;
    }
    sorted_ = oracle_sample(model).sorted;
}

double TruthCdf::operator()(double x) const {
    if (analytic_) return normal_cdf((x - mu_) / sd_);
    auto le = std::upper_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin();
    return static_cast<double>(le) / static_cast<double>(sorted_.size());
}

std::vector<double> true_spectral_cdf_on(const ModelSpec& model,
                                         std::span<const double> grid) {
    validate(model);
    if (model.family != ModelFamily::ARMA11)
        throw std::invalid_argument(
            "true_spectral_cdf_on: closed-form spectral density needs the ARMA family");
    // Cumulative trapezoid integration of
    //   f(w) = (1 + theta^2 + 2 theta cos w) / (1 + rho^2 - 2 rho cos w)
    // on a fine mesh of [0, pi]; constants cancel in the normalization.
    constexpr std::size_t kMesh = 1 << 18;
    const double h = std::numbers::pi / static_cast<double>(kMesh);
    auto f = [&](double w) {
        const double c = std::cos(w);
        return (1.0 + model.theta * model.theta + 2.0 * model.theta * c) /
               (1.0 + model.rho * model.rho - 2.0 * model.rho * c);
    };
    std::vector<double> cum(kMesh + 1);
    cum[0] = 0.0;
    double prev = f(0.0);
    for (std::size_t i = 1; i <= kMesh; ++i) {
        const double cur = f(h * static_cast<double>(i));
        cum[i] = cum[i - 1] + 0.5 * h * (prev + cur);
        prev = cur;
    }
    const double total = cum[kMesh];
    std::vector<double> out;
    out.reserve(grid.size());
    for (double lambda : grid) {
        if (lambda <= 0.0) {
            out.push_back(0.0);
            continue;
        }
        if (lambda >= std::numbers::pi) {
            out.push_back(1.0);
            continue;
        }
        const double pos = lambda / h;
        const auto idx = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(idx);
        const double v = cum[idx] + frac * (cum[idx + 1] - cum[idx]);
        out.push_back(v / total);
    }
    return out;
}

// --- configuration ----------------------------------------------------------

std::size_t effective_n_prime(const ExperimentConfig& cfg) {
    if (cfg.n_prime > 0) return cfg.n_prime;
    return cfg.target == ExperimentTarget::REGION_MEAN_MEDIAN ? 15 : 30;
}

void validate(const ExperimentConfig& cfg) {
    validate(cfg.model);
    if (cfg.n < 2) throw std::invalid_argument("config: n must be at least 2");
    if (cfg.b_list.empty()) throw std::invalid_argument("config: b_list is required");
    for (double b : cfg.b_list) {
        if (!(b > 0.0 && b < 1.0))
            throw std::invalid_argument("config: every b must be in (0, 1)");
        const auto l = static_cast<std::size_t>(
            std::llround(b * static_cast<double>(cfg.n)));
        if (l < 1 || l > cfg.n)
            throw std::invalid_argument("config: block length out of range for some b");
        if (cfg.target == ExperimentTarget::SPEC_BAND && l < 2)
            throw std::invalid_argument("config: spectral band needs block length >= 2");
    }
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
        throw std::invalid_argument("config: alpha must be in (0, 1)");
    if (cfg.reps == 0) throw std::invalid_argument("config: reps must be positive");
    if (!(cfg.trim >= 0.0 && cfg.trim < 0.5))
        throw std::invalid_argument("config: trim must be in [0, 0.5)");

    const bool ci_target = cfg.target == ExperimentTarget::CI_MEAN ||
                           cfg.target == ExperimentTarget::CI_TRIMMED_MEAN;
    if (ci_target) {
        if (cfg.calibration != HarnessCalibration::SMALL_B &&
            cfg.calibration != HarnessCalibration::FIXED_B)
            throw std::invalid_argument(
                "config: interval targets support small-b or fixed-b calibration");
        if (cfg.method == CiMethod::MBB && cfg.B == 0)
            throw std::invalid_argument("config: B must be positive for mbb");
    } else {
        if (cfg.calibration == HarnessCalibration::FIXED_B)
            throw std::invalid_argument(
                "config: region/band targets have no precomputed level; use double-ss");
        if (cfg.method != CiMethod::SS)
            throw std::invalid_argument("config: region/band targets run on subsampling");
        const std::size_t np = effective_n_prime(cfg);
        if (np < 2 || np >= cfg.n)
            throw std::invalid_argument("config: need 2 <= n_prime < n");
        if (cfg.calibration == HarnessCalibration::DOUBLE_SS_BS) {
            if (cfg.K1 < 2 || cfg.K1 >= cfg.K2 || cfg.K2 >= cfg.n)
                throw std::invalid_argument("config: need 2 <= K1 < K2 < n");
            if (!(cfg.g > 0.0 && cfg.g < 1.0))
                throw std::invalid_argument("config: g must be in (0, 1)");
        }
        if (cfg.target == ExperimentTarget::SPEC_BAND &&
            cfg.model.family != ModelFamily::ARMA11)
            throw std::invalid_argument(
                "config: spectral-band coverage needs the ARMA family (no spectral truth "
                "otherwise)");
    }
}

namespace {

ModelFamily family_from_string(const std::string& s) {
    if (s == "arma11") return ModelFamily::ARMA11;
    if (s == "sine") return ModelFamily::NONLINEAR_SINE;
    if (s == "tar1") return ModelFamily::TAR1;
    throw std::invalid_argument("config: unknown family: " + s);
}

ErrorDist err_from_string(const std::string& s) {
    if (s == "gaussian") return ErrorDist::GAUSSIAN;
    if (s == "exp") return ErrorDist::CENTERED_EXPONENTIAL;
    throw std::invalid_argument("config: unknown err: " + s);
}

// Accept "_" as a separator alias so config values can match the CSV style.
std::string canon(std::string s) {
    for (char& c : s)
        if (c == '_') c = '-';
    return s;
}

ExperimentTarget target_from_string(std::string s) {
    s = canon(std::move(s));
    if (s == "ci-mean") return ExperimentTarget::CI_MEAN;
    if (s == "ci-trimmed-mean") return ExperimentTarget::CI_TRIMMED_MEAN;
    if (s == "region-mean-median") return ExperimentTarget::REGION_MEAN_MEDIAN;
    if (s == "cdf-band") return ExperimentTarget::CDF_BAND;
    if (s == "spec-band") return ExperimentTarget::SPEC_BAND;
    throw std::invalid_argument("config: unknown target: " + s);
}

HarnessCalibration calibration_from_string(std::string s) {
    s = canon(std::move(s));
    if (s == "small-b") return HarnessCalibration::SMALL_B;
    if (s == "fixed-b") return HarnessCalibration::FIXED_B;
    if (s == "double-ss") return HarnessCalibration::DOUBLE_SS;
    if (s == "double-ss-bs") return HarnessCalibration::DOUBLE_SS_BS;
    throw std::invalid_argument("config: unknown calibration: " + s);
}

CiMethod method_from_string(const std::string& s) {
    if (s == "ss") return CiMethod::SS;
    if (s == "mbb") return CiMethod::MBB;
    throw std::invalid_argument("config: unknown method: " + s);
}

CiShape shape_from_string(std::string s) {
    s = canon(std::move(s));
    if (s == "symmetric") return CiShape::SYMMETRIC;
    if (s == "equal-tailed") return CiShape::EQUAL_TAILED;
    if (s == "upper") return CiShape::ONE_SIDED_UPPER;
    if (s == "lower") return CiShape::ONE_SIDED_LOWER;
    throw std::invalid_argument("config: unknown shape: " + s);
}

} // namespace

ExperimentConfig parse_config(std::istream& is) {
    ExperimentConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim_copy(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        const std::string key = lower_copy(trim_copy(line.substr(0, eq)));
        const std::string val = trim_copy(line.substr(eq + 1));
        const std::string lval = lower_copy(val);
        if (key == "family" || key == "model") cfg.model.family = family_from_string(lval);
        else if (key == "rho") cfg.model.rho = parse_double(val, key);
        else if (key == "theta") cfg.model.theta = parse_double(val, key);
        else if (key == "mu") cfg.model.mu = parse_double(val, key);
        else if (key == "err") cfg.model.err = err_from_string(lval);
        else if (key == "n") cfg.n = static_cast<std::size_t>(parse_u64(val, key));
        else if (key == "b_list") cfg.b_list = parse_double_list(val, key);
        else if (key == "alpha") cfg.alpha = parse_double(val, key);
        else if (key == "target") cfg.target = target_from_string(lval);
        else if (key == "method") cfg.method = method_from_string(lval);
        else if (key == "b") cfg.B = static_cast<std::size_t>(parse_u64(val, key));
        else if (key == "calibration") cfg.calibration = calibration_from_string(lval);
        else if (key == "shape") cfg.shape = shape_from_string(lval);
        else if (key == "trim") cfg.trim = parse_double(val, key);
        else if (key == "n_prime") cfg.n_prime = static_cast<std::size_t>(parse_u64(val, key));
        else if (key == "k1") cfg.K1 = static_cast<std::size_t>(parse_u64(val, key));
        else if (key == "k2") cfg.K2 = static_cast<std::size_t>(parse_u64(val, key));
        else if (key == "g") cfg.g = parse_double(val, key);
        else if (key == "reps") cfg.reps = static_cast<std::size_t>(parse_u64(val, key));
        else if (key == "seed") cfg.seed = parse_u64(val, key);
        else if (key == "threads") cfg.threads = static_cast<unsigned>(parse_u64(val, key));
        else
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": unknown key '" + key + "'");
    }
    validate(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file: " + path);
    return parse_config(is);
}

// --- experiment -------------------------------------------------------------

namespace {

Estimator target_estimator(const ExperimentConfig& cfg) {
    switch (cfg.target) {
    case ExperimentTarget::CI_MEAN: return Estimator::mean();
    case ExperimentTarget::CI_TRIMMED_MEAN: return Estimator::trimmed_mean(cfg.trim);
    case ExperimentTarget::REGION_MEAN_MEDIAN: return Estimator::mean_and_median();
    default: return Estimator::mean(); // bands do not evaluate a point estimator
    }
}

std::vector<double> fourier_grid(std::size_t n) {
    std::vector<double> grid;
    grid.reserve(n / 2 + 1);
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t s = 1; s <= n / 2; ++s)
        grid.push_back(two_pi * static_cast<double>(s) / static_cast<double>(n));
    if (n % 2 == 1) grid.push_back(std::numbers::pi);
    return grid;
}

CalibTarget calib_target(ExperimentTarget t) {
    switch (t) {
    case ExperimentTarget::REGION_MEAN_MEDIAN: return CalibTarget::REGION;
    case ExperimentTarget::CDF_BAND: return CalibTarget::CDF_BAND;
    case ExperimentTarget::SPEC_BAND: return CalibTarget::SPEC_BAND;
    default: throw std::logic_error("calib_target: not a set target");
    }
}

} // namespace

std::vector<CoverageRow> run_experiment(const ExperimentConfig& cfg) {
    validate(cfg);
    const std::size_t nb = cfg.b_list.size();
    const Estimator est = target_estimator(cfg);
    const bool ci_target = cfg.target == ExperimentTarget::CI_MEAN ||
                           cfg.target == ExperimentTarget::CI_TRIMMED_MEAN;

    // Truth is fixed across replications.
    double truth_scalar_v = 0.0;
    std::vector<double> truth_vec;
    std::optional<TruthCdf> truth_cdf;
    std::vector<double> truth_spec;
    if (ci_target) {
        truth_scalar_v = true_scalar(cfg.model, est.components[0]);
    } else if (cfg.target == ExperimentTarget::REGION_MEAN_MEDIAN) {
        truth_vec = true_vector(cfg.model, est);
    } else if (cfg.target == ExperimentTarget::CDF_BAND) {
        truth_cdf.emplace(cfg.model);
    } else {
        truth_spec = true_spectral_cdf_on(cfg.model, fourier_grid(cfg.n));
    }

    std::vector<std::uint8_t> covered(cfg.reps * nb, 0);
    std::vector<double> sizes(cfg.reps * nb, 0.0);

    parallel_for(cfg.reps, cfg.threads, [&](std::size_t r) {
        const std::uint64_t rep_stream = rng::substream(cfg.seed, r);
        const Series series =
            gen_series(cfg.model, cfg.n, rng::substream(rep_stream, 0));
        for (std::size_t bi = 0; bi < nb; ++bi) {
            const auto l = static_cast<std::size_t>(
                std::llround(cfg.b_list[bi] * static_cast<double>(cfg.n)));
            const BlockSpec bs{cfg.n, l};
            bool cov = false;
            double sz = 0.0;
            if (ci_target) {
                CiOptions opt;
                opt.alpha = cfg.alpha;
                opt.shape = cfg.shape;
                opt.method = cfg.method;
                opt.calibration = cfg.calibration == HarnessCalibration::FIXED_B
                                      ? CiCalibration::FIXED_B
                                      : CiCalibration::SMALL_B;
                opt.B = cfg.B;
                opt.seed = rng::substream(rep_stream, 1 + bi);
                const Interval ci = build_ci(series, bs, est, opt);
                cov = ci.contains(truth_scalar_v);
                sz = ci.width();
            } else {
                const CalibTarget ct = calib_target(cfg.target);
                double threshold = cfg.alpha;
                if (cfg.calibration != HarnessCalibration::SMALL_B) {
                    std::size_t np = effective_n_prime(cfg);
                    if (cfg.calibration == HarnessCalibration::DOUBLE_SS_BS)
                        np = bickel_sakov_select(series, bs, cfg.K1, cfg.K2, cfg.g, ct, est)
                                 .selected;
                    threshold = calibrated_threshold(
                        second_stage_pvalues(series, bs, np, ct, est), cfg.alpha);
                }
                if (ct == CalibTarget::REGION) {
                    const CalibratedRegion region =
                        region_from_threshold(series, bs, est, threshold);
                    cov = region.contains(truth_vec);
                    sz = region.radius;
                } else {
                    const CalibratedBand band =
                        band_from_threshold(series, bs, ct, threshold);
                    std::vector<double> cand;
                    if (ct == CalibTarget::CDF_BAND) {
                        cand.reserve(band.grid.size());
                        for (double x : band.grid) cand.push_back((*truth_cdf)(x));
                    } else {
                        if (truth_spec.size() != band.grid.size())
                            throw std::logic_error("spectral truth grid mismatch");
                        cand = truth_spec;
                    }
                    cov = band.contains(cand);
                    // Band size: mean pointwise extent of the band clipped
                    // to [0,1], since candidates for both targets are
                    // distribution-function values on that range.
                    double extent = 0.0;
                    for (double c : band.center)
                        extent += std::min(1.0, c + band.radius) -
                                  std::max(0.0, c - band.radius);
                    sz = extent / static_cast<double>(band.center.size());
                }
            }
            covered[r * nb + bi] = cov ? 1 : 0;
            sizes[r * nb + bi] = sz;
        }
    });

    std::vector<CoverageRow> rows(nb);
    for (std::size_t bi = 0; bi < nb; ++bi) {
        std::size_t hits = 0;
        double total = 0.0;
        for (std::size_t r = 0; r < cfg.reps; ++r) {
            hits += covered[r * nb + bi];
            total += sizes[r * nb + bi];
        }
        CoverageRow& row = rows[bi];
        row.model = to_string(cfg.model.family);
        row.rho = cfg.model.rho;
        row.theta = cfg.model.theta;
        row.err = to_string(cfg.model.err);
        row.n = cfg.n;
        row.b = cfg.b_list[bi];
        row.method = to_string(cfg.method);
        row.calibration = to_string(cfg.calibration);
        row.target = to_string(cfg.target);
        row.alpha = cfg.alpha;
        row.coverage = static_cast<double>(hits) / static_cast<double>(cfg.reps);
        row.mean_size = total / static_cast<double>(cfg.reps);
        row.reps = cfg.reps;
        row.seed = cfg.seed;
    }
    return rows;
}

void write_coverage_csv(std::ostream& os, std::span<const CoverageRow> rows) {
    os << "model,rho,theta,err,n,b,method,calibration,target,alpha,coverage,mean_size,"
          "reps,seed\n";
    char buf[320];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf,
                      "%s,%.10g,%.10g,%s,%zu,%.10g,%s,%s,%s,%.10g,%.10g,%.10g,%zu,%llu\n",
                      r.model.c_str(), r.rho, r.theta, r.err.c_str(), r.n, r.b,
                      r.method.c_str(), r.calibration.c_str(), r.target.c_str(), r.alpha,
                      r.coverage, r.mean_size, r.reps,
                      static_cast<unsigned long long>(r.seed));
        os << buf;
    }
}

// --- table regeneration -----------------------------------------------------

std::vector<CvFit> regen_cv_table(const RegenConfig& cfg, std::ostream* log) {
    std::vector<double> grid = cfg.b_grid;
    if (grid.empty())
        for (int i = 1; i <= 20; ++i) grid.push_back(static_cast<double>(i) / 100.0);
    std::vector<double> alphas = cfg.alphas;
    if (alphas.empty()) alphas = {0.05, 0.10};

    const std::size_t na = alphas.size();
    std::vector<double> boot_grid;
    // cv[kind][alpha index] aligned with `grid` (G rows) or `boot_grid` (H rows).
    std::vector<std::vector<double>> cv_g(na), cv_gt(na), cv_h(na), cv_ht(na);

    for (std::size_t bi = 0; bi < grid.size(); ++bi) {
        const double b = grid[bi];
        LimitSimConfig sim = cfg.sim;
        sim.seed = rng::substream(cfg.sim.seed, 2 * bi);
        auto sub = simulate_sub_limit_pair(b, sim);
        std::sort(sub.one_sided.begin(), sub.one_sided.end());
        std::sort(sub.symmetric.begin(), sub.symmetric.end());
        for (std::size_t a = 0; a < na; ++a) {
            cv_g[a].push_back(empirical_quantile({sub.one_sided}, alphas[a]));
            cv_gt[a].push_back(empirical_quantile({sub.symmetric}, alphas[a]));
        }

        const double ratio = 1.0 / b;
        if (std::abs(ratio - std::round(ratio)) > 1e-9) {
            if (log)
                *log << "notice: skipping b = " << b
                     << " for bootstrap rows (1/b is not an integer)\n";
            continue;
        }
        sim.seed = rng::substream(cfg.sim.seed, 2 * bi + 1);
        auto boot = simulate_boot_limit_pair(b, sim);
        std::sort(boot.one_sided.begin(), boot.one_sided.end());
        std::sort(boot.symmetric.begin(), boot.symmetric.end());
        boot_grid.push_back(b);
        for (std::size_t a = 0; a < na; ++a) {
            cv_h[a].push_back(empirical_quantile({boot.one_sided}, alphas[a]));
            cv_ht[a].push_back(empirical_quantile({boot.symmetric}, alphas[a]));
        }
    }

    std::vector<CvFit> out;
    out.reserve(4 * na);
    for (std::size_t a = 0; a < na; ++a) {
        CvFit f = fit_cv_poly(grid, cv_g[a], alphas[a]);
        f.kind = CvKind::G;
        out.push_back(f);
    }
    for (std::size_t a = 0; a < na; ++a) {
        CvFit f = fit_cv_poly(grid, cv_gt[a], alphas[a]);
        f.kind = CvKind::GTILDE;
        out.push_back(f);
    }
    for (std::size_t a = 0; a < na; ++a) {
        CvFit f = fit_cv_poly(boot_grid, cv_h[a], alphas[a]);
        f.kind = CvKind::H;
        out.push_back(f);
    }
    for (std::size_t a = 0; a < na; ++a) {
        CvFit f = fit_cv_poly(boot_grid, cv_ht[a], alphas[a]);
        f.kind = CvKind::HTILDE;
        out.push_back(f);
    }
    return out;
}

Series read_series_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open data file: " + path);
    Series out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim_copy(line);
        if (line.empty()) continue;
        const double x = parse_double(line, "data line " + std::to_string(lineno));
        if (!std::isfinite(x))
            throw std::invalid_argument("data file: non-finite value at line " +
                                        std::to_string(lineno));
        out.push_back(x);
    }
    if (out.size() < 2)
        throw std::invalid_argument("data file: need at least two observations");
    return out;
}

std::string to_string(ExperimentTarget t) {
    switch (t) {
    case ExperimentTarget::CI_MEAN: return "ci-mean";
    case ExperimentTarget::CI_TRIMMED_MEAN: return "ci-trimmed-mean";
    case ExperimentTarget::REGION_MEAN_MEDIAN: return "region-mean-median";
    case ExperimentTarget::CDF_BAND: return "cdf-band";
    case ExperimentTarget::SPEC_BAND: return "spec-band";
    }
    return "?";
}

std::string to_string(HarnessCalibration c) {
    switch (c) {
    case HarnessCalibration::SMALL_B: return "small-b";
    case HarnessCalibration::FIXED_B: return "fixed-b";
    case HarnessCalibration::DOUBLE_SS: return "double-ss";
    case HarnessCalibration::DOUBLE_SS_BS: return "double-ss-bs";
    }
    return "?";
}

std::string to_string(CiMethod m) { return m == CiMethod::SS ? "ss" : "mbb"; }

} // namespace fixedb
