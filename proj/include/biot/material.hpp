#pragma once

namespace biot {

struct LameCoefficients {
    double lambda = 0.0;
    double mu = 0.0;
};

/// Lamé coefficients from Young's modulus and Poisson ratio; rejects nu >= 0.5.
LameCoefficients lame_from_engineering(double E, double nu);

/**
 * Material data of the two-field model. `lambda` and `mu` are always derived
 * from `E` and `nu`; construct through `MaterialParams::make`.
 */
struct MaterialParams {
    double E = 1.0;
    double nu = 0.0;
    double alpha = 1.0;  // Biot-Willis constant
    double K = 1.0;      // permeability / fluid viscosity
    double lambda = 0.0;
    double mu = 0.5;

    static MaterialParams make(double E, double nu, double alpha, double K);
};

/// Pressure stabilization factor h / (4 (lambda + 2 mu)).
double stabilization_beta(double h, double lambda, double mu);

}  // namespace biot
