#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stochmech/grid.hpp"
#include "stochmech/kinematics.hpp"
#include "stochmech/montecarlo.hpp"
#include "stochmech/params.hpp"
#include "stochmech/states.hpp"

namespace stochmech {

// Time-indexed sequence of probability densities on a grid.
struct DensityTrack {
    Grid grid;
    std::vector<double> times;
    std::vector<std::vector<double>> densities; // [slice][node]
    std::vector<std::string> warnings;
    double max_step_mass_drift = 0.0;

    int n_slices() const { return static_cast<int>(times.size()); }
    GridField slice(int i) const {
        return GridField(grid, densities.at(i), times.at(i));
    }
    // Index of the recorded slice at time t (within half a recording
    // interval); throws if t was not recorded.
    int index_at(double t) const {
        for (int i = 0; i < n_slices(); ++i)
            if (std::abs(times[i] - t) < 1e-9 + 1e-9 * std::abs(t)) return i;
        throw std::invalid_argument("DensityTrack: time " + std::to_string(t) +
                                    " was not recorded");
    }
};

// Closed-form transition moments of the Ornstein-Uhlenbeck process
// dx = -theta x dt + dW, E[dW^2] = diffusion * dt, started at y:
//   mean(t) = y exp(-theta t),  var(t) = diffusion/(2 theta) (1 - exp(-2 theta t)).
// Independent oracle for the stationary-state transition solves (the
// harmonic ground state gives theta = z * omega, diffusion = 2 nu).
struct OuMoments {
    double mean;
    double variance;
};

inline OuMoments ou_transition_oracle(double theta, double diffusion, double y, double t) {
    if (!(theta > 0.0)) throw std::invalid_argument("ou_transition_oracle: theta must be > 0");
    if (t < 0.0) throw std::invalid_argument("ou_transition_oracle: t must be >= 0");
    const double decay = std::exp(-theta * t);
    return OuMoments{y * decay, diffusion / (2.0 * theta) * (1.0 - std::exp(-2.0 * theta * t))};
}

namespace detail {

// B(x) = x / (e^x - 1), the exponential-fitting weight of the conservative
// flux  F_{i+1/2} = (nu/h) [B(-p) P_i - B(p) P_{i+1}],  p = b h / nu.
// The discrete equilibrium of this flux is exactly P_{i+1}/P_i = e^p, so a
// density of the form exp(2R) is a fixed point when p = 2 (R_{i+1} - R_i).
inline double bernoulli_weight(double x) {
    if (std::abs(x) < 1e-5) return 1.0 - x / 2.0 + x * x / 12.0;
    return x / std::expm1(x);
}

// Conservative implicit time-centered stepper with no-flux ends; column sums
// of the flux divergence vanish, so h * sum(P) is conserved up to the
// rounding of the tridiagonal solve.
class ForwardSolver {
public:
    ForwardSolver(const Grid& g, double nu) : g_(g), nu_(nu), n_(g.n()) {
        lo_.resize(n_); di_.resize(n_); up_.resize(n_);
        cl_.resize(n_); cd_.resize(n_); cu_.resize(n_);
        gam_.resize(n_); rhs_.resize(n_);
    }

    // peclet[i] = b(x_{i+1/2}) h / nu for i = 0 .. n-2.
    void step(std::vector<double>& P, const std::vector<double>& peclet, double dt) {
        const double c = nu_ / (g_.h() * g_.h());
        std::fill(lo_.begin(), lo_.end(), 0.0);
        std::fill(di_.begin(), di_.end(), 0.0);
        std::fill(up_.begin(), up_.end(), 0.0);
        for (int i = 0; i + 1 < n_; ++i) {
            const double bm = c * bernoulli_weight(-peclet[i]);
            const double bp = c * bernoulli_weight(peclet[i]);
            di_[i] -= bm;
            up_[i] += bp;
            di_[i + 1] -= bp;
            lo_[i + 1] += bm;
        }
        // (I - dt/2 A) P1 = (I + dt/2 A) P0
        for (int i = 0; i < n_; ++i) {
            rhs_[i] = P[i] + 0.5 * dt * di_[i] * P[i];
            if (i > 0) rhs_[i] += 0.5 * dt * lo_[i] * P[i - 1];
            if (i + 1 < n_) rhs_[i] += 0.5 * dt * up_[i] * P[i + 1];
            cd_[i] = 1.0 - 0.5 * dt * di_[i];
            cl_[i] = -0.5 * dt * lo_[i];
            cu_[i] = -0.5 * dt * up_[i];
        }
        double bet = cd_[0];
        P[0] = rhs_[0] / bet;
        for (int i = 1; i < n_; ++i) {
            gam_[i] = cu_[i - 1] / bet;
            bet = cd_[i] - cl_[i] * gam_[i];
            P[i] = (rhs_[i] - cl_[i] * P[i - 1]) / bet;
        }
        for (int i = n_ - 2; i >= 0; --i) P[i] -= gam_[i + 1] * P[i + 1];
    }

private:
    Grid g_;
    double nu_;
    int n_;
    std::vector<double> lo_, di_, up_, cl_, cd_, cu_, gam_, rhs_;
};

using PecletFn = std::function<void(double t_half, std::vector<double>& peclet)>;

inline DensityTrack run_forward(const Grid& g, double nu, const GridField& initial,
                                const PecletFn& peclet_at, double dt, int steps,
                                int record_stride) {
    if (!(dt > 0.0)) throw std::invalid_argument("solve_forward: dt must be > 0");
    if (steps < 1) throw std::invalid_argument("solve_forward: steps must be >= 1");
    if (record_stride < 1)
        throw std::invalid_argument("solve_forward: record_stride must be >= 1");
    const int n = g.n();
    std::vector<double> P = initial.values();
    double mass = 0.0;
    for (double v : P) {
        if (v < 0.0)
            throw std::invalid_argument("solve_forward: initial density has negative entries");
        mass += v;
    }
    mass *= g.h();
    if (std::abs(mass - 1.0) > kNormTolerance)
        throw std::invalid_argument("solve_forward: initial density is not normalized");
    for (double& v : P) v /= mass;

    DensityTrack track{g, {}, {}, {}, 0.0};
    if (dt > 10.0 * g.h() * g.h() / (2.0 * nu))
        track.warnings.push_back("dt exceeds 10 h^2/(2 nu); sharp features are under-resolved");
    track.times.push_back(initial.time());
    track.densities.push_back(P);

    ForwardSolver solver(g, nu);
    std::vector<double> peclet(n - 1);
    double prev_mass = 1.0;
    for (int k = 0; k < steps; ++k) {
        const double t_half = initial.time() + (k + 0.5) * dt;
        peclet_at(t_half, peclet);
        solver.step(P, peclet, dt);

        double m = 0.0, mn = 0.0;
        for (double v : P) { m += v; mn = std::min(mn, v); }
        m *= g.h();
        track.max_step_mass_drift = std::max(track.max_step_mass_drift,
                                             std::abs(m - prev_mass));
        if (!(std::abs(m - 1.0) <= kNormTolerance)) // NaN-safe
            throw SchemeError("solve_forward: mass drifted to " + std::to_string(m) +
                              " at step " + std::to_string(k + 1));
        if (mn < -1e-12)
            throw SchemeError("solve_forward: density undershoot " + std::to_string(mn) +
                              " at step " + std::to_string(k + 1));
        if (mn < 0.0) {
            for (double& v : P) v = std::max(v, 0.0);
            double m2 = 0.0;
            for (double v : P) m2 += v;
            const double rescale = m / (m2 * g.h());
            for (double& v : P) v *= rescale * g.h();
        }
        prev_mass = m;

        if ((k + 1) % record_stride == 0 || k + 1 == steps) {
            track.times.push_back(initial.time() + (k + 1) * dt);
            track.densities.push_back(P);
        }
    }
    return track;
}

} // namespace detail

// Solves the forward (Fokker-Planck) equation
//   dP/dt + d/dx [ b(x,t) P ] - nu d2P/dx2 = 0
// with no-flux ends, conservative exponential-fitted fluxes and implicit
// time-centered stepping.  The drift is sampled at half nodes and half time
// steps.
inline DensityTrack solve_forward(const DriftFn& b, const ModelParams& p,
                                  const GridField& initial, double dt, int steps,
                                  int record_stride = 1) {
    const Grid g = initial.grid();
    const double nu = p.nu;
    auto peclet_at = [&, g, nu](double t_half, std::vector<double>& peclet) {
        for (int i = 0; i + 1 < g.n(); ++i)
            peclet[i] = b(g.x(i) + 0.5 * g.h(), t_half) * g.h() / nu;
    };
    return detail::run_forward(g, nu, initial, peclet_at, dt, steps, record_stride);
}

// Transition density from a point source at y for a real stationary state:
// the drift reduces to nu * grad(ln rho) = 2 nu grad(R), which is checked
// against make_drifts before solving.  The delta initial condition is
// mollified to a Gaussian of width eps (default max(2h, 2% of the domain));
// oracle comparisons carry the eps^2 moment correction.
inline DensityTrack transition_density(const WavePolar& stationary, const ModelParams& p,
                                       double y, double dt, int steps, double eps = 0.0,
                                       int record_stride = 1) {
    const Grid g = stationary.grid();
    const DriftPair d = make_drifts(stationary, p);
    const GridField osmotic = 2.0 * p.nu * gradient(stationary.R);
    const double mismatch = max_abs(d.b - osmotic);
    if (mismatch > 1e-10)
        throw std::invalid_argument(
            "transition_density: drift differs from 2 nu grad(R) by " +
            std::to_string(mismatch) + "; state is not stationary-real");

    if (eps == 0.0) eps = std::max(2.0 * g.h(), 0.02 * (g.x_max() - g.x_min()));
    if (eps < 2.0 * g.h())
        throw std::invalid_argument("transition_density: eps must be at least 2h");
    if (y <= g.x_min() + 3.0 * eps || y >= g.x_max() - 3.0 * eps)
        throw std::invalid_argument("transition_density: y too close to the domain edge");

    std::vector<double> init(g.n());
    double mass = 0.0;
    for (int i = 0; i < g.n(); ++i) {
        const double u = (g.x(i) - y) / eps;
        init[i] = std::exp(-0.5 * u * u);
        mass += init[i];
    }
    for (double& v : init) v /= mass * g.h();

    // Half-node Peclet numbers straight from R differences: p = 2 (R_{i+1} - R_i),
    // which makes exp(2R) the exact discrete equilibrium.
    std::vector<double> peclet_const(g.n() - 1);
    for (int i = 0; i + 1 < g.n(); ++i)
        peclet_const[i] = 2.0 * (stationary.R[i + 1] - stationary.R[i]);
    auto peclet_at = [peclet_const](double, std::vector<double>& peclet) {
        peclet = peclet_const;
    };
    return detail::run_forward(g, p.nu, GridField(g, std::move(init), 0.0), peclet_at,
                               dt, steps, record_stride);
}

inline double slice_mean(const DensityTrack& t, int i) {
    const GridField P = t.slice(i);
    const GridField x = make_field(t.grid, [](double u) { return u; });
    return trapezoid(x * P);
}

inline double slice_variance(const DensityTrack& t, int i) {
    const double m = slice_mean(t, i);
    const GridField P = t.slice(i);
    const GridField xx = make_field(t.grid, [m](double u) { return (u - m) * (u - m); });
    return trapezoid(xx * P);
}

inline double l1_between(const GridField& a, const GridField& b) {
    return trapezoid(zip_fields(a, b, [](double x, double y) { return std::abs(x - y); }));
}

// L1 distance of every stored slice from a reference density, in time order.
inline std::vector<double> equilibrium_check(const DensityTrack& t, const GridField& rho) {
    std::vector<double> out;
    out.reserve(t.n_slices());
    for (int i = 0; i < t.n_slices(); ++i) out.push_back(l1_between(t.slice(i), rho));
    return out;
}

} // namespace stochmech
