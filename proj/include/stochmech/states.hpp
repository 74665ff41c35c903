#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "stochmech/grid.hpp"
#include "stochmech/params.hpp"

namespace stochmech {

// Polar pair of a node-free wavefunction: psi = exp(R + i S), with S the
// phase in units of hbar and rho = exp(2R) the probability density.
struct WavePolar {
    GridField R;
    GridField S;

    double time() const { return R.time(); }
    const Grid& grid() const { return R.grid(); }
    GridField rho() const {
        return map_field(R, [](double r) { return std::exp(2.0 * r); });
    }
};

// Time derivatives of the polar pair at the same instant.
struct WaveDot {
    GridField dR;
    GridField dS;
};

// Checks the WavePolar invariants: shared grid and time stamp, finite fields
// (guaranteed by GridField), and unit normalization of rho = exp(2R).
inline void validate_wave(const WavePolar& w, double tol = kNormTolerance) {
    require_same_grid(w.R, w.S);
    if (w.R.time() != w.S.time())
        throw std::invalid_argument("WavePolar: R and S carry different time stamps");
    const double mass_total = trapezoid(w.rho());
    if (std::abs(mass_total - 1.0) > tol)
        throw std::invalid_argument(
            "WavePolar: exp(2R) integrates to " + std::to_string(mass_total) +
            ", expected 1 (grid too narrow or state not normalized)");
}

// An analytic catalog entry: closed forms for R, S, their time and space
// derivatives, and the potential the state solves.  All states are
// node-free; excited oscillator states and box states are deliberately
// absent because their nodes send R to -infinity.
struct CatalogState {
    std::string name;
    std::function<double(double, double)> R;     // (x, t)
    std::function<double(double, double)> S;     // (x, t)
    std::function<double(double, double)> dR_dt;
    std::function<double(double, double)> dS_dt;
    std::function<double(double, double)> dR_dx;
    std::function<double(double, double)> dS_dx;
    std::function<double(double)> V;

    WavePolar sample(const Grid& g, double t) const {
        WavePolar w{make_field(g, [&](double x) { return R(x, t); }, t),
                    make_field(g, [&](double x) { return S(x, t); }, t)};
        validate_wave(w);
        return w;
    }

    WaveDot sample_dot(const Grid& g, double t) const {
        return WaveDot{make_field(g, [&](double x) { return dR_dt(x, t); }, t),
                       make_field(g, [&](double x) { return dS_dt(x, t); }, t)};
    }

    GridField potential(const Grid& g) const {
        return make_field(g, V);
    }
};

// Harmonic-oscillator ground state, V = m w^2 x^2 / 2.
//   R(x)    = -m w x^2 / (2 hbar) + (1/4) ln(m w / (pi hbar))
//   S(t)    = -w t / 2
inline CatalogState ho_ground(double omega, double hbar = 1.0, double mass = 1.0) {
    if (!(omega > 0.0)) throw std::invalid_argument("ho_ground: omega must be > 0");
    const double a = mass * omega / hbar;
    const double logn = 0.25 * std::log(a / std::numbers::pi);
    CatalogState s;
    s.name = "ho_ground";
    s.R = [=](double x, double) { return -0.5 * a * x * x + logn; };
    s.S = [=](double, double t) { return -0.5 * omega * t; };
    s.dR_dt = [](double, double) { return 0.0; };
    s.dS_dt = [=](double, double) { return -0.5 * omega; };
    s.dR_dx = [=](double x, double) { return -a * x; };
    s.dS_dx = [](double, double) { return 0.0; };
    s.V = [=](double x) { return 0.5 * mass * omega * omega * x * x; };
    return s;
}

// Coherent (displaced-ground) oscillator state with classical center
// x_c(t) = A cos(w t).  The density is a rigid Gaussian of variance
// hbar/(2 m w); the phase carries the classical momentum m x_c'(t).
inline CatalogState ho_coherent(double omega, double amplitude,
                                double hbar = 1.0, double mass = 1.0) {
    if (!(omega > 0.0)) throw std::invalid_argument("ho_coherent: omega must be > 0");
    const double a = mass * omega / hbar;
    const double logn = 0.25 * std::log(a / std::numbers::pi);
    const double A = amplitude;
    CatalogState s;
    s.name = "ho_coherent";
    auto xc = [=](double t) { return A * std::cos(omega * t); };
    auto vc = [=](double t) { return -A * omega * std::sin(omega * t); };
    s.R = [=](double x, double t) {
        const double u = x - xc(t);
        return -0.5 * a * u * u + logn;
    };
    s.S = [=](double x, double t) {
        const double phi = -0.5 * omega * t -
                           mass * omega * A * A / (4.0 * hbar) * std::sin(2.0 * omega * t);
        return mass * vc(t) * (x - xc(t)) / hbar + phi;
    };
    s.dR_dt = [=](double x, double t) { return a * (x - xc(t)) * vc(t); };
    s.dS_dt = [=](double x, double t) {
        const double acc = -omega * omega * xc(t);
        const double phidot = -0.5 * omega -
                              mass * omega * omega * A * A / (2.0 * hbar) *
                                  std::cos(2.0 * omega * t);
        return mass * (acc * (x - xc(t)) - vc(t) * vc(t)) / hbar + phidot;
    };
    s.dR_dx = [=](double x, double t) { return -a * (x - xc(t)); };
    s.dS_dx = [=](double, double t) { return mass * vc(t) / hbar; };
    s.V = [=](double x) { return 0.5 * mass * omega * omega * x * x; };
    return s;
}

// Free dispersing Gaussian packet, V = 0.  Density variance grows as
// sigma_t^2 = sigma0^2 (1 + tau^2) with tau = hbar t / (2 m sigma0^2).
inline CatalogState free_gaussian(double x0, double p0, double sigma0,
                                  double hbar = 1.0, double mass = 1.0) {
    if (!(sigma0 > 0.0)) throw std::invalid_argument("free_gaussian: sigma0 must be > 0");
    const double taudot = hbar / (2.0 * mass * sigma0 * sigma0);
    CatalogState s;
    s.name = "free_gaussian";
    auto tau = [=](double t) { return taudot * t; };
    auto s2 = [=](double t) { const double u = tau(t); return sigma0 * sigma0 * (1.0 + u * u); };
    auto xbar = [=](double t) { return x0 + p0 * t / mass; };
    s.R = [=](double x, double t) {
        const double xi = x - xbar(t);
        return -xi * xi / (4.0 * s2(t)) - 0.25 * std::log(2.0 * std::numbers::pi * s2(t));
    };
    s.S = [=](double x, double t) {
        const double xi = x - xbar(t);
        return tau(t) * xi * xi / (4.0 * s2(t)) + p0 * (x - x0) / hbar -
               p0 * p0 * t / (2.0 * mass * hbar) - 0.5 * std::atan(tau(t));
    };
    s.dR_dt = [=](double x, double t) {
        const double xi = x - xbar(t), v = s2(t), u = tau(t);
        const double s2dot = hbar * u / mass;
        return xi * p0 / (2.0 * mass * v) + xi * xi * s2dot / (4.0 * v * v) -
               s2dot / (4.0 * v);
    };
    s.dS_dt = [=](double x, double t) {
        const double xi = x - xbar(t), v = s2(t), u = tau(t);
        const double s2dot = hbar * u / mass;
        return taudot * xi * xi / (4.0 * v) - u * xi * p0 / (2.0 * mass * v) -
               u * xi * xi * s2dot / (4.0 * v * v) - p0 * p0 / (2.0 * mass * hbar) -
               taudot / (2.0 * (1.0 + u * u));
    };
    s.dR_dx = [=](double x, double t) { return -(x - xbar(t)) / (2.0 * s2(t)); };
    s.dS_dx = [=](double x, double t) {
        return tau(t) * (x - xbar(t)) / (2.0 * s2(t)) + p0 / hbar;
    };
    s.V = [](double) { return 0.0; };
    return s;
}

// Reconstructs the complex samples psi = exp(R + i S).
inline std::pair<std::vector<double>, std::vector<double>> reconstruct_psi(const WavePolar& w) {
    const int n = w.grid().n();
    std::vector<double> re(n), im(n);
    for (int i = 0; i < n; ++i) {
        const double amp = std::exp(w.R[i]);
        re[i] = amp * std::cos(w.S[i]);
        im[i] = amp * std::sin(w.S[i]);
    }
    return {std::move(re), std::move(im)};
}

// Extracts (R, S) from complex samples.  R = log|psi|; S is the phase
// unwrapped left to right, anchored to its principal value at x_min.
// Any point with |psi|^2 below `floor` times the peak density is treated as
// a node and rejected: the polar pair is meaningless there.
inline WavePolar polar_decompose(const GridField& psi_re, const GridField& psi_im,
                                 double floor = kDensityFloor) {
    require_same_grid(psi_re, psi_im);
    const int n = psi_re.n();
    std::vector<double> rho(n);
    double peak = 0.0;
    for (int i = 0; i < n; ++i) {
        rho[i] = psi_re[i] * psi_re[i] + psi_im[i] * psi_im[i];
        peak = std::max(peak, rho[i]);
    }
    for (int i = 0; i < n; ++i)
        if (!(rho[i] > floor * peak))
            throw NodeError("polar_decompose: density at x = " +
                            std::to_string(psi_re.grid().x(i)) +
                            " is below the floor (node)");
    std::vector<double> R(n), S(n);
    double prev = std::atan2(psi_im[0], psi_re[0]);
    S[0] = prev;
    R[0] = 0.5 * std::log(rho[0]);
    for (int i = 1; i < n; ++i) {
        R[i] = 0.5 * std::log(rho[i]);
        double theta = std::atan2(psi_im[i], psi_re[i]);
        double d = theta - prev;
        d -= 2.0 * std::numbers::pi * std::round(d / (2.0 * std::numbers::pi));
        S[i] = S[i - 1] + d;
        prev = theta;
    }
    WavePolar w{GridField(psi_re.grid(), std::move(R), psi_re.time()),
                GridField(psi_re.grid(), std::move(S), psi_re.time())};
    validate_wave(w);
    return w;
}

// Central-difference time derivatives of a catalog state, used where the
// analytic dR_dt / dS_dt route is deliberately avoided.
inline WaveDot snapshot_time_derivatives(const CatalogState& st, const Grid& g,
                                         double t, double dt) {
    WavePolar plus = st.sample(g, t + dt);
    WavePolar minus = st.sample(g, t - dt);
    const double inv = 1.0 / (2.0 * dt);
    return WaveDot{
        GridField(g, [&] {
            std::vector<double> v(g.n());
            for (int i = 0; i < g.n(); ++i) v[i] = (plus.R[i] - minus.R[i]) * inv;
            return v;
        }(), t),
        GridField(g, [&] {
            std::vector<double> v(g.n());
            for (int i = 0; i < g.n(); ++i) v[i] = (plus.S[i] - minus.S[i]) * inv;
            return v;
        }(), t)};
}

} // namespace stochmech
