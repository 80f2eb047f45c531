#include "fixedb/calibrate.hpp"
#include "fixedb/fixedb_limits.hpp"
#include "fixedb/harness.hpp"
#include "fixedb/resampling.hpp"
#include "fixedb/rng.hpp"
#include "fixedb/series_gen.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

namespace {

using namespace fixedb;

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

// Options shared by the data-driven subcommands: either a data file or a
// generated series, plus the block geometry.
struct SeriesCli {
    std::string data_path;
    std::string family = "arma11";
    double rho = 0.0, theta = 0.0, mu = 0.0;
    std::string err = "gaussian";
    std::size_t n = 0;
    std::uint64_t seed = 12345;
    std::size_t l = 0;
    double b = 0.0;

    void attach(CLI::App* cmd, bool need_block = true) {
        cmd->add_option("--data", data_path, "data file, one value per line ('#' comments)");
        cmd->add_option("--family", family, "generated model: arma11|sine|tar1");
        cmd->add_option("--rho", rho, "AR coefficient (arma11)");
        cmd->add_option("--theta", theta, "MA coefficient (arma11)");
        cmd->add_option("--mu", mu, "location shift");
        cmd->add_option("--err", err, "innovations: gaussian|exp");
        cmd->add_option("--n", n, "length of the generated series");
        cmd->add_option("--seed", seed, "seed for generation and resampling");
        if (need_block) {
            cmd->add_option("--l", l, "block length");
            cmd->add_option("--b", b, "block fraction l/n (alternative to --l)");
        }
    }

    ModelSpec model() const {
        ModelSpec m;
        if (family == "arma11") m.family = ModelFamily::ARMA11;
        else if (family == "sine") m.family = ModelFamily::NONLINEAR_SINE;
        else if (family == "tar1") m.family = ModelFamily::TAR1;
        else throw CLI::ValidationError("--family", "unknown family: " + family);
        if (err == "gaussian") m.err = ErrorDist::GAUSSIAN;
        else if (err == "exp") m.err = ErrorDist::CENTERED_EXPONENTIAL;
        else throw CLI::ValidationError("--err", "unknown err: " + err);
        m.rho = rho;
        m.theta = theta;
        m.mu = mu;
        return m;
    }

    Series series() const {
        if (!data_path.empty()) return read_series_file(data_path);
        if (n == 0)
            throw CLI::ValidationError("--data/--n", "give a data file or --n to generate");
        return gen_series(model(), n, seed);
    }

    BlockSpec block(std::size_t series_n) const {
        BlockSpec spec;
        spec.n = series_n;
        if (l > 0) spec.l = l;
        else if (b > 0.0)
            spec.l = static_cast<std::size_t>(std::llround(b * static_cast<double>(series_n)));
        else
            throw CLI::ValidationError("--l/--b", "block length required");
        validate(spec);
        return spec;
    }
};

Estimator parse_estimator(const std::string& names, double trim) {
    Estimator est;
    std::istringstream is(names);
    std::string item;
    while (std::getline(is, item, ',')) {
        if (item == "mean") est.components.push_back({EstimatorKind::MEAN, 0.0});
        else if (item == "median") est.components.push_back({EstimatorKind::MEDIAN, 0.0});
        else if (item == "trimmed-mean")
            est.components.push_back({EstimatorKind::TRIMMED_MEAN, trim});
        else throw CLI::ValidationError("--estimator", "unknown estimator: " + item);
    }
    validate(est);
    return est;
}

CalibTarget parse_set_target(const std::string& s) {
    if (s == "region") return CalibTarget::REGION;
    if (s == "cdf-band") return CalibTarget::CDF_BAND;
    if (s == "spec-band") return CalibTarget::SPEC_BAND;
    throw CLI::ValidationError("--target", "unknown target: " + s);
}

// Stream that is std::cout unless --out was given.
class OutStream {
public:
    explicit OutStream(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw std::runtime_error("cannot open output file: " + path);
        }
    }
    std::ostream& get() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fixed-b calibrated block resampling inference"};
    app.require_subcommand(1);

    // --- ci -----------------------------------------------------------------
    auto* ci_cmd = app.add_subcommand("ci", "confidence interval for a scalar estimator");
    SeriesCli ci_series;
    ci_series.attach(ci_cmd);
    double ci_alpha = 0.05, ci_trim = 0.25;
    std::string ci_method = "ss", ci_calibration = "small-b", ci_shape = "symmetric";
    std::string ci_estimator = "mean", ci_out;
    std::size_t ci_B = 5000;
    ci_cmd->add_option("--alpha", ci_alpha, "nominal level");
    ci_cmd->add_option("--method", ci_method, "ss|mbb");
    ci_cmd->add_option("--calibration", ci_calibration, "small-b|fixed-b");
    ci_cmd->add_option("--shape", ci_shape, "symmetric|equal-tailed|upper|lower");
    ci_cmd->add_option("--estimator", ci_estimator, "mean|median|trimmed-mean");
    ci_cmd->add_option("--trim", ci_trim, "trim proportion per tail");
    ci_cmd->add_option("--B", ci_B, "bootstrap replicates (mbb)");
    ci_cmd->add_option("--out", ci_out, "write result here instead of stdout");

    // --- pvalue ---------------------------------------------------------------
    auto* pv_cmd = app.add_subcommand("pvalue", "resampling p-value for a null value");
    SeriesCli pv_series;
    pv_series.attach(pv_cmd);
    std::string pv_theta0, pv_kind = "symmetric", pv_method = "ss", pv_out;
    std::string pv_estimator = "mean";
    double pv_trim = 0.25;
    std::size_t pv_B = 5000;
    bool pv_exact = false;
    pv_cmd->add_option("--theta0", pv_theta0, "null value (comma list for vectors)")
        ->required();
    pv_cmd->add_option("--kind", pv_kind, "upper|lower|symmetric|norm");
    pv_cmd->add_option("--method", pv_method, "ss|mbb");
    pv_cmd->add_option("--estimator", pv_estimator, "comma list: mean|median|trimmed-mean");
    pv_cmd->add_option("--trim", pv_trim, "trim proportion per tail");
    pv_cmd->add_option("--B", pv_B, "bootstrap replicates (mbb)");
    pv_cmd->add_flag("--exact", pv_exact, "enumerate every bootstrap sample (tiny n only)");
    pv_cmd->add_option("--out", pv_out, "write result here instead of stdout");

    // --- region ---------------------------------------------------------------
    auto* rg_cmd = app.add_subcommand("region", "calibrated ball for a vector estimator");
    SeriesCli rg_series;
    rg_series.attach(rg_cmd);
    double rg_alpha = 0.05, rg_trim = 0.25, rg_g = 0.75;
    std::string rg_estimator = "mean,median", rg_out;
    std::size_t rg_nprime = 15, rg_K1 = 5, rg_K2 = 40;
    bool rg_bs = false, rg_traditional = false;
    rg_cmd->add_option("--alpha", rg_alpha, "nominal level");
    rg_cmd->add_option("--estimator", rg_estimator, "comma list of components");
    rg_cmd->add_option("--trim", rg_trim, "trim proportion per tail");
    rg_cmd->add_option("--n-prime", rg_nprime, "second-stage window");
    rg_cmd->add_flag("--bickel-sakov", rg_bs, "pick the window by the data-driven rule");
    rg_cmd->add_option("--K1", rg_K1, "smallest candidate window");
    rg_cmd->add_option("--K2", rg_K2, "largest candidate window");
    rg_cmd->add_option("--g", rg_g, "geometric decay of candidates");
    rg_cmd->add_flag("--traditional", rg_traditional, "uncalibrated set (threshold alpha)");
    rg_cmd->add_option("--out", rg_out, "write result here instead of stdout");

    // --- band -------------------------------------------------------------------
    auto* bd_cmd = app.add_subcommand("band", "calibrated sup-norm band (CDF or spectrum)");
    SeriesCli bd_series;
    bd_series.attach(bd_cmd);
    double bd_alpha = 0.05, bd_g = 0.75;
    std::string bd_target = "cdf-band", bd_out;
    std::size_t bd_nprime = 30, bd_K1 = 5, bd_K2 = 40;
    bool bd_bs = false, bd_traditional = false;
    bd_cmd->add_option("--target", bd_target, "cdf-band|spec-band");
    bd_cmd->add_option("--alpha", bd_alpha, "nominal level");
    bd_cmd->add_option("--n-prime", bd_nprime, "second-stage window");
    bd_cmd->add_flag("--bickel-sakov", bd_bs, "pick the window by the data-driven rule");
    bd_cmd->add_option("--K1", bd_K1, "smallest candidate window");
    bd_cmd->add_option("--K2", bd_K2, "largest candidate window");
    bd_cmd->add_option("--g", bd_g, "geometric decay of candidates");
    bd_cmd->add_flag("--traditional", bd_traditional, "uncalibrated band (threshold alpha)");
    bd_cmd->add_option("--out", bd_out, "band table csv: x,center,lo,hi");

    // --- select-blocksize ---------------------------------------------------------
    auto* sb_cmd = app.add_subcommand("select-blocksize",
                                      "data-driven second-stage window selection");
    SeriesCli sb_series;
    sb_series.attach(sb_cmd);
    std::string sb_target = "cdf-band", sb_estimator = "mean,median", sb_out;
    double sb_g = 0.75, sb_trim = 0.25;
    std::size_t sb_K1 = 5, sb_K2 = 40;
    sb_cmd->add_option("--target", sb_target, "region|cdf-band|spec-band");
    sb_cmd->add_option("--estimator", sb_estimator, "components (region target)");
    sb_cmd->add_option("--trim", sb_trim, "trim proportion per tail");
    sb_cmd->add_option("--K1", sb_K1, "smallest candidate window");
    sb_cmd->add_option("--K2", sb_K2, "largest candidate window");
    sb_cmd->add_option("--g", sb_g, "geometric decay of candidates");
    sb_cmd->add_option("--out", sb_out, "write result here instead of stdout");

    // --- coverage -------------------------------------------------------------
    auto* cv_cmd = app.add_subcommand("coverage", "coverage experiment from a config file");
    std::string cv_config, cv_out;
    bool cv_paper = false;
    unsigned cv_threads = 0;
    cv_cmd->add_option("--config", cv_config, "flat key = value experiment config")
        ->required();
    cv_cmd->add_option("--out", cv_out, "write the csv here instead of stdout");
    cv_cmd->add_flag("--paper-scale", cv_paper,
                     "full-scale replication counts (reps 10000 for intervals, 1000 for "
                     "regions and bands, B 5000)");
    auto* cv_threads_opt =
        cv_cmd->add_option("--threads", cv_threads, "worker threads (0: hardware)");

    // --- regen-table ------------------------------------------------------------
    auto* rt_cmd = app.add_subcommand("regen-table",
                                      "re-simulate the calibration-level table");
    std::string rt_bgrid, rt_alphas, rt_out;
    std::size_t rt_paths = 0, rt_grid = 0, rt_draws = 0;
    std::uint64_t rt_seed = 12345;
    unsigned rt_threads = 0;
    bool rt_paper = false;
    rt_cmd->add_option("--paths", rt_paths, "Monte Carlo paths");
    rt_cmd->add_option("--grid-n", rt_grid, "partial-sum steps per path");
    rt_cmd->add_option("--boot-draws", rt_draws, "inner draws per path (bootstrap rows)");
    rt_cmd->add_option("--b-grid", rt_bgrid, "comma list (default 0.01..0.20 step 0.01)");
    rt_cmd->add_option("--alphas", rt_alphas, "comma list (default 0.05,0.1)");
    rt_cmd->add_option("--seed", rt_seed, "simulation seed");
    rt_cmd->add_option("--threads", rt_threads, "worker threads (0: hardware)");
    rt_cmd->add_flag("--paper-scale", rt_paper,
                     "full-scale simulation (paths 50000, grid 5000, draws 50000)");
    rt_cmd->add_option("--out", rt_out, "write the csv here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(ci_cmd)) {
            const Series ts = ci_series.series();
            const BlockSpec spec = ci_series.block(ts.size());
            CiOptions opt;
            opt.alpha = ci_alpha;
            opt.B = ci_B;
            opt.seed = rng::substream(ci_series.seed, 1);
            if (ci_method == "ss") opt.method = CiMethod::SS;
            else if (ci_method == "mbb") opt.method = CiMethod::MBB;
            else throw CLI::ValidationError("--method", "unknown method: " + ci_method);
            if (ci_calibration == "small-b") opt.calibration = CiCalibration::SMALL_B;
            else if (ci_calibration == "fixed-b") opt.calibration = CiCalibration::FIXED_B;
            else
                throw CLI::ValidationError("--calibration",
                                           "unknown calibration: " + ci_calibration);
            if (ci_shape == "symmetric") opt.shape = CiShape::SYMMETRIC;
            else if (ci_shape == "equal-tailed") opt.shape = CiShape::EQUAL_TAILED;
            else if (ci_shape == "upper") opt.shape = CiShape::ONE_SIDED_UPPER;
            else if (ci_shape == "lower") opt.shape = CiShape::ONE_SIDED_LOWER;
            else throw CLI::ValidationError("--shape", "unknown shape: " + ci_shape);
            const Estimator est = parse_estimator(ci_estimator, ci_trim);
            const Interval ci = build_ci(ts, spec, est, opt);
            OutStream out(ci_out);
            out.get() << fmt(ci.lo) << ' ' << fmt(ci.hi) << '\n';
        } else if (app.got_subcommand(pv_cmd)) {
            const Series ts = pv_series.series();
            const BlockSpec spec = pv_series.block(ts.size());
            const Estimator est = parse_estimator(pv_estimator, pv_trim);
            std::vector<double> theta0;
            {
                std::istringstream is(pv_theta0);
                std::string item;
                while (std::getline(is, item, ','))
                    theta0.push_back(std::stod(item));
            }
            PValueKind kind;
            if (pv_kind == "upper") kind = PValueKind::UPPER;
            else if (pv_kind == "lower") kind = PValueKind::LOWER;
            else if (pv_kind == "symmetric") kind = PValueKind::SYMMETRIC;
            else if (pv_kind == "norm") kind = PValueKind::VECTOR_NORM;
            else throw CLI::ValidationError("--kind", "unknown kind: " + pv_kind);
            Rational p;
            if (pv_method == "ss") {
                p = subsample_pvalue(ts, spec, est, theta0, kind);
            } else if (pv_method == "mbb") {
                p = pv_exact ? mbb_pvalue_exact(ts, spec, est, theta0, kind)
                             : mbb_pvalue(ts, spec, est, theta0, kind, pv_B,
                                          rng::substream(pv_series.seed, 1));
            } else {
                throw CLI::ValidationError("--method", "unknown method: " + pv_method);
            }
            OutStream out(pv_out);
            out.get() << fmt(p.value()) << " (" << p.num << '/' << p.den << ")\n";
        } else if (app.got_subcommand(rg_cmd)) {
            const Series ts = rg_series.series();
            const BlockSpec spec = rg_series.block(ts.size());
            const Estimator est = parse_estimator(rg_estimator, rg_trim);
            OutStream out(rg_out);
            double threshold = rg_alpha;
            std::size_t np = rg_nprime;
            if (!rg_traditional) {
                if (rg_bs) {
                    const BsSelection sel = bickel_sakov_select(
                        ts, spec, rg_K1, rg_K2, rg_g, CalibTarget::REGION, est);
                    np = sel.selected;
                    out.get() << "candidates =";
                    for (std::size_t c : sel.candidates) out.get() << ' ' << c;
                    out.get() << '\n';
                }
                threshold = calibrated_threshold(
                    second_stage_pvalues(ts, spec, np, CalibTarget::REGION, est), rg_alpha);
                out.get() << "n_prime = " << np << '\n';
            }
            const CalibratedRegion region = region_from_threshold(ts, spec, est, threshold);
            out.get() << "center =";
            for (double c : region.center) out.get() << ' ' << fmt(c);
            out.get() << '\n';
            out.get() << "radius = " << fmt(region.radius) << '\n';
            out.get() << "threshold = " << fmt(region.threshold) << '\n';
        } else if (app.got_subcommand(bd_cmd)) {
            const Series ts = bd_series.series();
            const BlockSpec spec = bd_series.block(ts.size());
            const CalibTarget target = parse_set_target(bd_target);
            if (target == CalibTarget::REGION)
                throw CLI::ValidationError("--target", "band targets only");
            double threshold = bd_alpha;
            std::size_t np = bd_nprime;
            std::ostringstream head;
            if (!bd_traditional) {
                if (bd_bs) {
                    const BsSelection sel = bickel_sakov_select(
                        ts, spec, bd_K1, bd_K2, bd_g, target, Estimator::mean());
                    np = sel.selected;
                    head << "# candidates =";
                    for (std::size_t c : sel.candidates) head << ' ' << c;
                    head << '\n';
                }
                threshold = calibrated_threshold(
                    second_stage_pvalues(ts, spec, np, target, Estimator::mean()),
                    bd_alpha);
                head << "# n_prime = " << np << '\n';
            }
            const CalibratedBand band = band_from_threshold(ts, spec, target, threshold);
            std::cout << head.str() << "radius = " << fmt(band.radius)
                      << "\nthreshold = " << fmt(band.threshold) << '\n';
            if (!bd_out.empty()) {
                std::ofstream csv(bd_out);
                if (!csv) throw std::runtime_error("cannot open output file: " + bd_out);
                csv << "x,center,lo,hi\n";
                for (std::size_t i = 0; i < band.grid.size(); ++i) {
                    const double lo = std::max(0.0, band.center[i] - band.radius);
                    const double hi = std::min(1.0, band.center[i] + band.radius);
                    csv << fmt(band.grid[i]) << ',' << fmt(band.center[i]) << ','
                        << fmt(lo) << ',' << fmt(hi) << '\n';
                }
            }
        } else if (app.got_subcommand(sb_cmd)) {
            const Series ts = sb_series.series();
            const BlockSpec spec = sb_series.block(ts.size());
            const CalibTarget target = parse_set_target(sb_target);
            const Estimator est = parse_estimator(sb_estimator, sb_trim);
            const BsSelection sel =
                bickel_sakov_select(ts, spec, sb_K1, sb_K2, sb_g, target, est);
            OutStream out(sb_out);
            out.get() << "candidates =";
            for (std::size_t c : sel.candidates) out.get() << ' ' << c;
            out.get() << "\ndistances =";
            for (double d : sel.distances) out.get() << ' ' << fmt(d);
            out.get() << "\nselected = " << sel.selected << '\n';
        } else if (app.got_subcommand(cv_cmd)) {
            ExperimentConfig cfg = load_config(cv_config);
            if (cv_paper) {
                const bool ci_target = cfg.target == ExperimentTarget::CI_MEAN ||
                                       cfg.target == ExperimentTarget::CI_TRIMMED_MEAN;
                cfg.reps = ci_target ? 10000 : 1000;
                cfg.B = 5000;
            }
            if (cv_threads_opt->count() > 0) cfg.threads = cv_threads;
            const auto rows = run_experiment(cfg);
            OutStream out(cv_out);
            write_coverage_csv(out.get(), rows);
        } else if (app.got_subcommand(rt_cmd)) {
            RegenConfig cfg;
            cfg.sim = desk_preset(rt_seed);
            if (rt_paper) {
                cfg.sim.paths = 50000;
                cfg.sim.grid_n = 5000;
                cfg.sim.boot_draws = 50000;
            }
            if (rt_paths > 0) cfg.sim.paths = rt_paths;
            if (rt_grid > 0) cfg.sim.grid_n = rt_grid;
            if (rt_draws > 0) cfg.sim.boot_draws = rt_draws;
            cfg.sim.threads = rt_threads;
            if (!rt_bgrid.empty()) {
                std::istringstream is(rt_bgrid);
                std::string item;
                while (std::getline(is, item, ',')) cfg.b_grid.push_back(std::stod(item));
            }
            if (!rt_alphas.empty()) {
                std::istringstream is(rt_alphas);
                std::string item;
                while (std::getline(is, item, ',')) cfg.alphas.push_back(std::stod(item));
            }
            const auto table = regen_cv_table(cfg, &std::cerr);
            OutStream out(rt_out);
            write_cv_table(out.get(), table);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
