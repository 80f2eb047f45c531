#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fixedb {

using Series = std::vector<double>;

enum class ModelFamily { ARMA11, NONLINEAR_SINE, TAR1 };
enum class ErrorDist { GAUSSIAN, CENTERED_EXPONENTIAL };

// Stationary data-generating process. mu is a location shift applied to
// the stationary core process of every family; rho/theta only matter for
// ARMA11 (the nonlinear families have fixed autoregression functions).
struct ModelSpec {
    ModelFamily family = ModelFamily::ARMA11;
    double rho = 0.0;    // AR(1) coefficient, |rho| < 1
    double theta = 0.0;  // MA(1) coefficient
    double mu = 0.0;     // location shift
    ErrorDist err = ErrorDist::GAUSSIAN;
};

void validate(const ModelSpec& spec);

// Draws a length-n realization. Innovations come from the substream
// keyed by (seed) alone, so the output is a pure function of
// (spec, n, seed). The first 1000 steps are discarded as burn-in;
// recursions start from zero initial conditions.
Series gen_series(const ModelSpec& spec, std::size_t n, std::uint64_t seed);

std::string to_string(ModelFamily f);
std::string to_string(ErrorDist e);

} // namespace fixedb
