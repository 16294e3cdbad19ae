#include "biot/material.hpp"

#include <stdexcept>
#include <string>

namespace biot {

LameCoefficients lame_from_engineering(double E, double nu) {
    if (!(E > 0.0)) throw std::invalid_argument("lame_from_engineering: E must be positive");
    if (!(nu >= 0.0) || !(nu < 0.5)) {
        throw std::invalid_argument("lame_from_engineering: nu must lie in [0, 0.5), got " + std::to_string(nu));
    }
    return {E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)), E / (2.0 * (1.0 + nu))};
}

MaterialParams MaterialParams::make(double E, double nu, double alpha, double K) {
    if (!(alpha > 0.0) || !(alpha <= 1.0)) throw std::invalid_argument("MaterialParams: alpha must lie in (0, 1]");
    if (!(K > 0.0)) throw std::invalid_argument("MaterialParams: K must be positive");
    const auto lame = lame_from_engineering(E, nu);
    return MaterialParams{E, nu, alpha, K, lame.lambda, lame.mu};
}

double stabilization_beta(double h, double lambda, double mu) {
    if (!(h > 0.0)) throw std::invalid_argument("stabilization_beta: h must be positive");
    return h / (4.0 * (lambda + 2.0 * mu));
}

}  // namespace biot
