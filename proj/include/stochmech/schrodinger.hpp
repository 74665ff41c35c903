#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "stochmech/grid.hpp"
#include "stochmech/params.hpp"
#include "stochmech/states.hpp"

namespace stochmech {

namespace detail {

using cvec = std::vector<std::complex<double>>;

// One Crank-Nicolson step of i hbar dpsi/dt = (-hbar^2/(2m) Lap + V) psi on a
// Dirichlet-truncated grid.  The discrete Hamiltonian is Hermitian, so the
// Cayley step is unitary and the discrete norm is conserved to rounding.
class CrankNicolson {
public:
    CrankNicolson(const GridField& V, double hbar, double mass, double dt)
        : n_(V.n()), h_(V.grid().h()) {
        const double kin = hbar * hbar / (2.0 * mass * h_ * h_);
        diag_.resize(n_);
        for (int i = 0; i < n_; ++i) diag_[i] = 2.0 * kin + V[i];
        off_ = -kin;
        a_ = std::complex<double>(0.0, dt / (2.0 * hbar));
        work_.resize(n_);
        gam_.resize(n_);
    }

    void step(cvec& psi) {
        // rhs = (I - a H) psi
        for (int i = 0; i < n_; ++i) {
            std::complex<double> hpsi = diag_[i] * psi[i];
            if (i > 0) hpsi += off_ * psi[i - 1];
            if (i + 1 < n_) hpsi += off_ * psi[i + 1];
            work_[i] = psi[i] - a_ * hpsi;
        }
        // solve (I + a H) psi = rhs, tridiagonal Thomas sweep
        const std::complex<double> lo = a_ * off_;
        std::complex<double> bet = 1.0 + a_ * diag_[0];
        psi[0] = work_[0] / bet;
        for (int i = 1; i < n_; ++i) {
            gam_[i] = lo / bet;
            bet = (1.0 + a_ * diag_[i]) - lo * gam_[i];
            psi[i] = (work_[i] - lo * psi[i - 1]) / bet;
        }
        for (int i = n_ - 2; i >= 0; --i) psi[i] -= gam_[i + 1] * psi[i + 1];
    }

private:
    int n_;
    double h_;
    std::vector<double> diag_;
    double off_;
    std::complex<double> a_;
    cvec work_;
    cvec gam_;
};

inline double norm_trapezoid(const cvec& psi, double h) {
    double s = 0.0;
    for (const auto& c : psi) s += std::norm(c);
    s -= 0.5 * (std::norm(psi.front()) + std::norm(psi.back()));
    return s * h;
}

} // namespace detail

// Evolves a polar state by `steps` implicit time-centered steps of the wave
// equation, keeping the complex field in between and decomposing back to
// polar form once at the end.  The returned phase is kept continuous with
// the input: the additive 2*pi branch is fixed by tracking the unwrapped
// phase at the central node across steps.
inline WavePolar schrodinger_evolve(const WavePolar& w, const GridField& V,
                                    const ModelParams& p, double dt, int steps,
                                    double floor = kDensityFloor) {
    if (!(dt > 0.0)) throw std::invalid_argument("schrodinger_evolve: dt must be > 0");
    if (steps < 1) throw std::invalid_argument("schrodinger_evolve: steps must be >= 1");
    require_same_grid(w.R, V);
    const Grid& g = w.grid();
    const int n = g.n();
    const int mid = n / 2;

    auto [re, im] = reconstruct_psi(w);
    detail::cvec psi(n);
    for (int i = 0; i < n; ++i) psi[i] = {re[i], im[i]};
    const double norm0 = detail::norm_trapezoid(psi, g.h());

    detail::CrankNicolson cn(V, p.hbar, p.mass, dt);
    double anchor = w.S[mid];
    double prev_angle = std::arg(psi[mid]);
    for (int k = 0; k < steps; ++k) {
        cn.step(psi);
        const double norm1 = detail::norm_trapezoid(psi, g.h());
        if (std::abs(norm1 - norm0) > 1e-10 * norm0)
            throw SchemeError("schrodinger_evolve: norm drifted by " +
                              std::to_string(norm1 - norm0) + " at step " +
                              std::to_string(k));
        double angle = std::arg(psi[mid]);
        double d = angle - prev_angle;
        d -= 2.0 * std::numbers::pi * std::round(d / (2.0 * std::numbers::pi));
        anchor += d;
        prev_angle = angle;
    }

    const double t1 = w.time() + steps * dt;
    std::vector<double> re1(n), im1(n);
    for (int i = 0; i < n; ++i) {
        re1[i] = psi[i].real();
        im1[i] = psi[i].imag();
    }
    WavePolar out = polar_decompose(GridField(g, std::move(re1), t1),
                                    GridField(g, std::move(im1), t1), floor);
    // shift S onto the branch tracked through the evolution
    const double shift =
        2.0 * std::numbers::pi *
        std::round((anchor - out.S[mid]) / (2.0 * std::numbers::pi));
    if (shift != 0.0)
        out.S = map_field(out.S, [shift](double s) { return s + shift; });
    return out;
}

// Single implicit time-centered step; dt <= h^2 m / hbar is recommended for
// accuracy of the phase near the truncation boundary.
inline WavePolar schrodinger_step(const WavePolar& w, const GridField& V,
                                  const ModelParams& p, double dt,
                                  double floor = kDensityFloor) {
    return schrodinger_evolve(w, V, p, dt, 1, floor);
}

} // namespace stochmech
