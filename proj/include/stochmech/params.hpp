#pragma once

#include <cmath>
#include <stdexcept>

namespace stochmech {

// Physical constants together with the linked triple (nu, beta, z):
//   z * hbar = 2 * mass * nu        and        z = 1 / sqrt(1 - beta/2).
// The triple is stored redundantly and validated at construction so that a
// violated relation surfaces immediately rather than deep inside a solver.
struct ModelParams {
    double hbar;
    double mass;
    double nu;   // diffusion constant, length^2 / time
    double beta; // dimensionless, < 2
    double z;    // dimensionless, > 0

    void validate() const {
        if (!(hbar > 0.0)) throw std::invalid_argument("ModelParams: hbar must be > 0");
        if (!(mass > 0.0)) throw std::invalid_argument("ModelParams: mass must be > 0");
        if (!(nu > 0.0)) throw std::invalid_argument("ModelParams: nu must be > 0");
        if (!(beta < 2.0)) throw std::invalid_argument("ModelParams: beta must be < 2");
        if (!(z > 0.0)) throw std::invalid_argument("ModelParams: z must be > 0");
        const double lhs = z * hbar, rhs = 2.0 * mass * nu;
        if (std::abs(lhs - rhs) > 1e-12 * std::max(std::abs(lhs), std::abs(rhs)))
            throw std::invalid_argument("ModelParams: z*hbar != 2*mass*nu");
        const double zb = 1.0 / std::sqrt(1.0 - beta / 2.0);
        if (std::abs(z - zb) > 1e-12 * zb)
            throw std::invalid_argument("ModelParams: z != 1/sqrt(1-beta/2)");
    }
};

inline ModelParams params_from_beta(double hbar, double mass, double beta) {
    if (!(hbar > 0.0)) throw std::invalid_argument("params_from_beta: hbar must be > 0");
    if (!(mass > 0.0)) throw std::invalid_argument("params_from_beta: mass must be > 0");
    if (!(beta < 2.0))
        throw std::invalid_argument("params_from_beta: beta must be < 2 (z pole at beta = 2)");
    const double z = 1.0 / std::sqrt(1.0 - beta / 2.0);
    const double nu = z * hbar / (2.0 * mass);
    ModelParams p{hbar, mass, nu, beta, z};
    p.validate();
    return p;
}

inline ModelParams params_from_nu(double hbar, double mass, double nu) {
    if (!(hbar > 0.0)) throw std::invalid_argument("params_from_nu: hbar must be > 0");
    if (!(mass > 0.0)) throw std::invalid_argument("params_from_nu: mass must be > 0");
    if (!(nu > 0.0)) throw std::invalid_argument("params_from_nu: nu must be > 0");
    const double z = 2.0 * mass * nu / hbar;
    const double beta = 2.0 * (1.0 - 1.0 / (z * z));
    ModelParams p{hbar, mass, nu, beta, z};
    p.validate();
    return p;
}

inline ModelParams params_from_z(double hbar, double mass, double z) {
    if (!(z > 0.0)) throw std::invalid_argument("params_from_z: z must be > 0");
    return params_from_nu(hbar, mass, z * hbar / (2.0 * mass));
}

} // namespace stochmech
