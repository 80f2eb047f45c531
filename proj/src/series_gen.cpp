#include "fixedb/series_gen.hpp"

#include "fixedb/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace fixedb {

namespace {

constexpr std::size_t kBurnIn = 1000;

class Innovations {
public:
    Innovations(ErrorDist dist, std::uint64_t seed)
        : engine_(rng::make_engine(seed)), dist_(dist) {}

    double next() {
        if (dist_ == ErrorDist::GAUSSIAN) return normal_(engine_);
        return expo_(engine_) - 1.0; // Exp(1) shifted to mean 0, variance 1
    }

private:
    std::mt19937_64 engine_;
    ErrorDist dist_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::exponential_distribution<double> expo_{1.0};
};

} // namespace

void validate(const ModelSpec& spec) {
    if (spec.family == ModelFamily::ARMA11) {
        if (!(std::abs(spec.rho) < 1.0))
            throw std::invalid_argument("ModelSpec: ARMA11 requires |rho| < 1");
    }
    if (!std::isfinite(spec.rho) || !std::isfinite(spec.theta) || !std::isfinite(spec.mu))
        throw std::invalid_argument("ModelSpec: parameters must be finite");
}

Series gen_series(const ModelSpec& spec, std::size_t n, std::uint64_t seed) {
    validate(spec);
    if (n < 2) throw std::invalid_argument("gen_series: n must be at least 2");

    Innovations eps(spec.err, seed);
    Series out(n);

    switch (spec.family) {
    case ModelFamily::ARMA11: {
        double u = 0.0;      // u_0 = 0
        double e_prev = 0.0; // eps_0 = 0
        for (std::size_t t = 0; t < kBurnIn + n; ++t) {
            double e = eps.next();
            u = spec.rho * u + e + spec.theta * e_prev;
            e_prev = e;
            if (t >= kBurnIn) out[t - kBurnIn] = spec.mu + u;
        }
        break;
    }
    case ModelFamily::NONLINEAR_SINE: {
        double x = 0.0;
        for (std::size_t t = 0; t < kBurnIn + n; ++t) {
            x = 0.6 * std::sin(x) + eps.next();
            if (t >= kBurnIn) out[t - kBurnIn] = spec.mu + x;
        }
        break;
    }
    case ModelFamily::TAR1: {
        double x = 0.0;
        for (std::size_t t = 0; t < kBurnIn + n; ++t) {
            x = (x > 0.0 ? 0.3 : 0.8) * x + eps.next();
            if (t >= kBurnIn) out[t - kBurnIn] = spec.mu + x;
        }
        break;
    }
    }
    return out;
}

std::string to_string(ModelFamily f) {
    switch (f) {
    case ModelFamily::ARMA11: return "arma11";
    case ModelFamily::NONLINEAR_SINE: return "sine";
    case ModelFamily::TAR1: return "tar1";
    }
    return "?";
}

std::string to_string(ErrorDist e) {
    return e == ErrorDist::GAUSSIAN ? "gaussian" : "exp";
}

} // namespace fixedb
