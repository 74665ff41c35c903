#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include "stochmech/grid.hpp"
#include "stochmech/params.hpp"
#include "stochmech/states.hpp"

namespace stochmech {

// Residual magnitudes of one equation check.  By convention the two grid
// endpoints are excluded: the one-sided stencils there carry a larger
// constant and the underlying statements are made on an open region.
struct ResidualReport {
    double max_abs_real = 0.0;
    double max_abs_imag = 0.0;
    double l2_real = 0.0;
    double l2_imag = 0.0;
    bool interior_only = true;
};

// Raw residual fields before reduction, for pointwise identity checks.
struct ResidualFields {
    GridField real;
    GridField imag;
};

inline ResidualReport reduce_residual(const ResidualFields& r, bool interior_only = true) {
    const int n = r.real.n();
    const int lo = interior_only ? 1 : 0;
    const int hi = interior_only ? n - 1 : n;
    ResidualReport rep;
    rep.interior_only = interior_only;
    double s2r = 0.0, s2i = 0.0;
    for (int i = lo; i < hi; ++i) {
        rep.max_abs_real = std::max(rep.max_abs_real, std::abs(r.real[i]));
        rep.max_abs_imag = std::max(rep.max_abs_imag, std::abs(r.imag[i]));
        s2r += r.real[i] * r.real[i];
        s2i += r.imag[i] * r.imag[i];
    }
    const double h = r.real.grid().h();
    rep.l2_real = std::sqrt(h * s2r);
    rep.l2_imag = std::sqrt(h * s2i);
    return rep;
}

// Quantum-potential factor  Delta(sqrt rho)/sqrt rho  =  Delta R + (grad R)^2,
// computed from the right-hand side.  The sqrt-rho route is available as an
// independent cross-check below.
inline GridField quantum_potential(const GridField& R) {
    GridField gR = gradient(R);
    return laplacian(R) + gR * gR;
}

inline GridField quantum_potential_sqrt_rho_route(const GridField& R) {
    GridField s = map_field(R, [](double r) { return std::exp(r); }); // sqrt(rho) = exp(R)
    GridField ls = laplacian(s);
    return zip_fields(ls, s, [](double a, double b) { return a / b; });
}

// Residual of the wave equation in divided (per-psi) form:
//   real: -hbar^2/(2m) { DR + (gR)^2 - (gS)^2 } + V + hbar*dS/dt
//   imag: -hbar^2/(2m) { DS + 2 gR.gS } - hbar*dR/dt
// Both vanish identically for an exact node-free solution.
inline ResidualFields residual_fields_eq1(const WavePolar& w, const WaveDot& dot,
                                          const GridField& V, double hbar, double mass) {
    require_same_grid(w.R, V);
    require_same_grid(w.R, dot.dR);
    const GridField gR = gradient(w.R), lR = laplacian(w.R);
    const GridField gS = gradient(w.S), lS = laplacian(w.S);
    const double c = hbar * hbar / (2.0 * mass);
    const int n = w.grid().n();
    std::vector<double> re(n), im(n);
    for (int i = 0; i < n; ++i) {
        re[i] = -c * (lR[i] + gR[i] * gR[i] - gS[i] * gS[i]) + V[i] + hbar * dot.dS[i];
        im[i] = -c * (lS[i] + 2.0 * gR[i] * gS[i]) - hbar * dot.dR[i];
    }
    return ResidualFields{GridField(w.grid(), std::move(re), w.time()),
                          GridField(w.grid(), std::move(im), w.time())};
}

// Residual of the scaled equation in divided form, for psi_z = exp(R + iS/z)
// with S the hbar-phase.  The counter-term (z^2-1) hbar^2/(2m) times the
// quantum-potential factor enters through its (DR + (gR)^2) form, so the real
// residual coincides with the unscaled one and the imaginary residual is
// exactly z times it.
inline ResidualFields residual_fields_eq2(const WavePolar& w, const WaveDot& dot,
                                          const GridField& V, const ModelParams& p) {
    require_same_grid(w.R, V);
    const GridField gR = gradient(w.R), lR = laplacian(w.R);
    const GridField gS = gradient(w.S), lS = laplacian(w.S);
    const double z = p.z;
    const double c1 = p.hbar * p.hbar / (2.0 * p.mass);
    const double c2 = (z * p.hbar) * (z * p.hbar) / (2.0 * p.mass);
    const int n = w.grid().n();
    std::vector<double> re(n), im(n);
    for (int i = 0; i < n; ++i) {
        const double qp = lR[i] + gR[i] * gR[i];
        re[i] = -c2 * (qp - gS[i] * gS[i] / (z * z)) + V[i] + (z * z - 1.0) * c1 * qp +
                p.hbar * dot.dS[i];
        im[i] = -c2 * (lS[i] / z + 2.0 * gR[i] * gS[i] / z) - z * p.hbar * dot.dR[i];
    }
    return ResidualFields{GridField(w.grid(), std::move(re), w.time()),
                          GridField(w.grid(), std::move(im), w.time())};
}

inline ResidualReport residual_eq1(const WavePolar& w, const WaveDot& dot,
                                   const GridField& V, double hbar, double mass) {
    return reduce_residual(residual_fields_eq1(w, dot, V, hbar, mass));
}

inline ResidualReport residual_eq2(const WavePolar& w, const WaveDot& dot,
                                   const GridField& V, const ModelParams& p) {
    return reduce_residual(residual_fields_eq2(w, dot, V, p));
}

// Momentum expectation computed along two routes that must agree for every
// nu:
//   lhs = Int rho hbar grad(S)        (real part of Int psi* (-i hbar grad) psi,
//                                      written out for psi = exp(R+iS))
//   rhs = Int rho 2 m nu grad(S/z)    (mean flow velocity times 2 m nu)
// Their equality is the content of z hbar = 2 m nu; it holds to rounding, not
// merely to discretization error.
inline std::pair<double, double> momentum_expectation(const WavePolar& w,
                                                      const ModelParams& p) {
    const GridField rho = w.rho();
    const GridField gS = gradient(w.S);
    const GridField SN = (1.0 / p.z) * w.S;
    const GridField gSN = gradient(SN);
    const double lhs = trapezoid(zip_fields(rho, gS, [&](double r, double g) {
        return r * p.hbar * g;
    }));
    const double rhs = trapezoid(zip_fields(rho, gSN, [&](double r, double g) {
        return r * 2.0 * p.mass * p.nu * g;
    }));
    return {lhs, rhs};
}

} // namespace stochmech
