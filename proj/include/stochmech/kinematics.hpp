#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "stochmech/equivalence.hpp"
#include "stochmech/grid.hpp"
#include "stochmech/params.hpp"
#include "stochmech/states.hpp"

namespace stochmech {

// Forward and backward drift fields of the diffusion attached to a state:
//   b  = 2 nu grad(R) + (hbar/m) grad(S)
//   b* = b - 4 nu grad(R)
// The current part (hbar/m) grad(S) is independent of nu; the osmotic part
// 2 nu grad(R) is not.
struct DriftPair {
    GridField b;
    GridField b_star;
    ModelParams params;

    double time() const { return b.time(); }
    const Grid& grid() const { return b.grid(); }
};

inline DriftPair make_drifts(const WavePolar& w, const ModelParams& p) {
    const GridField gR = gradient(w.R);
    const GridField gS = gradient(w.S);
    const int n = w.grid().n();
    std::vector<double> b(n), bs(n);
    for (int i = 0; i < n; ++i) {
        const double osmotic = 2.0 * p.nu * gR[i];
        const double current = p.hbar / p.mass * gS[i];
        b[i] = osmotic + current;
        bs[i] = b[i] - 4.0 * p.nu * gR[i];
    }
    return DriftPair{GridField(w.grid(), std::move(b), w.time()),
                     GridField(w.grid(), std::move(bs), w.time()), p};
}

// Uniformly spaced time slices of one scalar field, used to form the
// partial-time term of D and D* by central differences.
struct ScalarHistory {
    std::vector<GridField> slices;
    double dt = 0.0;

    int middle() const { return static_cast<int>(slices.size()) / 2; }
    void require_central() const {
        if (slices.size() < 3 || slices.size() % 2 == 0)
            throw std::invalid_argument(
                "ScalarHistory: need an odd number (>= 3) of slices for a central "
                "time derivative");
        if (!(dt > 0.0)) throw std::invalid_argument("ScalarHistory: dt must be > 0");
    }

    GridField central_dt() const {
        require_central();
        const int m = middle();
        const GridField& plus = slices[m + 1];
        const GridField& minus = slices[m - 1];
        require_same_grid(plus, minus);
        const int n = plus.n();
        std::vector<double> v(n);
        for (int i = 0; i < n; ++i) v[i] = (plus[i] - minus[i]) / (2.0 * dt);
        return GridField(plus.grid(), std::move(v), slices[m].time());
    }
};

// Mean forward derivative  D f = df/dt + b . grad f + nu Lap f, and the
// backward one  D* f = df/dt + b* . grad f - nu Lap f.
inline GridField apply_D(const GridField& f, const GridField& dfdt, const DriftPair& d) {
    require_same_grid(f, d.b);
    require_same_grid(f, dfdt);
    const GridField gf = gradient(f), lf = laplacian(f);
    const int n = f.n();
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
        v[i] = dfdt[i] + d.b[i] * gf[i] + d.params.nu * lf[i];
    return GridField(f.grid(), std::move(v), f.time());
}

inline GridField apply_Dstar(const GridField& f, const GridField& dfdt, const DriftPair& d) {
    require_same_grid(f, d.b);
    require_same_grid(f, dfdt);
    const GridField gf = gradient(f), lf = laplacian(f);
    const int n = f.n();
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
        v[i] = dfdt[i] + d.b_star[i] * gf[i] - d.params.nu * lf[i];
    return GridField(f.grid(), std::move(v), f.time());
}

inline GridField apply_D(const ScalarHistory& f, const DriftPair& d) {
    f.require_central();
    return apply_D(f.slices[f.middle()], f.central_dt(), d);
}

inline GridField apply_Dstar(const ScalarHistory& f, const DriftPair& d) {
    f.require_central();
    return apply_Dstar(f.slices[f.middle()], f.central_dt(), d);
}

// (D - D*) f = (b - b*) . grad f + 2 nu Lap f; the time term cancels, so no
// history is needed.
inline GridField apply_D_minus_Dstar(const GridField& f, const DriftPair& d) {
    require_same_grid(f, d.b);
    const GridField gf = gradient(f), lf = laplacian(f);
    const int n = f.n();
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
        v[i] = (d.b[i] - d.b_star[i]) * gf[i] + 2.0 * d.params.nu * lf[i];
    return GridField(f.grid(), std::move(v), f.time());
}

// States and drifts on uniformly spaced time slices around an instant of
// interest.
struct FieldHistory {
    std::vector<WavePolar> states;
    std::vector<DriftPair> drifts;
    double dt = 0.0;

    int middle() const { return static_cast<int>(states.size()) / 2; }
    void require_central() const {
        if (states.size() != drifts.size())
            throw std::invalid_argument("FieldHistory: states/drifts size mismatch");
        if (states.size() < 3 || states.size() % 2 == 0)
            throw std::invalid_argument("FieldHistory: need an odd number (>= 3) of slices");
        if (!(dt > 0.0)) throw std::invalid_argument("FieldHistory: dt must be > 0");
    }

    ScalarHistory b_history() const {
        ScalarHistory h{{}, dt};
        for (const auto& d : drifts) h.slices.push_back(d.b);
        return h;
    }
    ScalarHistory b_star_history() const {
        ScalarHistory h{{}, dt};
        for (const auto& d : drifts) h.slices.push_back(d.b_star);
        return h;
    }
};

inline FieldHistory history_from_catalog(const CatalogState& st, const Grid& g,
                                         double t_mid, double dt, const ModelParams& p,
                                         int half_width = 1) {
    if (half_width < 1) throw std::invalid_argument("history_from_catalog: half_width >= 1");
    FieldHistory h;
    h.dt = dt;
    for (int k = -half_width; k <= half_width; ++k) {
        WavePolar w = st.sample(g, t_mid + k * dt);
        h.drifts.push_back(make_drifts(w, p));
        h.states.push_back(std::move(w));
    }
    return h;
}

// Analytic time derivative of the drift fields of a catalog state:
//   db/dt = 2 nu grad(dR/dt) + (hbar/m) grad(dS/dt),  db*/dt = db/dt - 4 nu grad(dR/dt).
inline DriftPair drift_time_derivative(const CatalogState& st, const Grid& g, double t,
                                       const ModelParams& p) {
    const GridField dR = make_field(g, [&](double x) { return st.dR_dt(x, t); }, t);
    const GridField dS = make_field(g, [&](double x) { return st.dS_dt(x, t); }, t);
    const GridField gdR = gradient(dR), gdS = gradient(dS);
    const int n = g.n();
    std::vector<double> db(n), dbs(n);
    for (int i = 0; i < n; ++i) {
        db[i] = 2.0 * p.nu * gdR[i] + p.hbar / p.mass * gdS[i];
        dbs[i] = db[i] - 4.0 * p.nu * gdR[i];
    }
    return DriftPair{GridField(g, std::move(db), t), GridField(g, std::move(dbs), t), p};
}

// Mean acceleration  (m/2)(D D* + D* D) x = (m/2)(D b* + D* b).
inline GridField mean_acceleration(const DriftPair& d, const DriftPair& ddt) {
    const ModelParams& p = d.params;
    const GridField Dbs = apply_D(d.b_star, ddt.b_star, d);
    const GridField Dsb = apply_Dstar(d.b, ddt.b, d);
    return 0.5 * p.mass * (Dbs + Dsb);
}

inline GridField mean_acceleration(const FieldHistory& h) {
    h.require_central();
    const int m = h.middle();
    const DriftPair& d = h.drifts[m];
    const GridField Dbs = apply_D(d.b_star, h.b_star_history().central_dt(), d);
    const GridField Dsb = apply_Dstar(d.b, h.b_history().central_dt(), d);
    return 0.5 * d.params.mass * (Dbs + Dsb);
}

// Osmotic acceleration  m (beta/8) (D - D*)^2 x,  evaluated by operator
// composition.  (D - D*) x = b - b*, then one more application.
inline GridField osmotic_acceleration(const DriftPair& d) {
    const ModelParams& p = d.params;
    const GridField u = d.b - d.b_star;
    return (p.mass * p.beta / 8.0) * apply_D_minus_Dstar(u, d);
}

inline GridField osmotic_acceleration(const FieldHistory& h) {
    h.require_central();
    return osmotic_acceleration(h.drifts[h.middle()]);
}

// Same quantity through the potential-gradient form grad[m beta nu^2 Q] with
// Q the quantum-potential factor, either from (DR + (gR)^2) or from the
// sqrt-rho route.
inline GridField osmotic_acceleration_gradient_route(const GridField& R,
                                                     const ModelParams& p) {
    return gradient((p.mass * p.beta * p.nu * p.nu) * quantum_potential(R));
}

inline GridField osmotic_acceleration_sqrt_rho_route(const GridField& R,
                                                     const ModelParams& p) {
    return gradient((p.mass * p.beta * p.nu * p.nu) * quantum_potential_sqrt_rho_route(R));
}

// Residual of the generalized dynamical law: for a state solving the wave
// equation with potential V,
//   (m/2)(D D* + D* D) x + m (beta/8)(D - D*)^2 x + grad V  ->  0
// for every beta < 2 on the same state data.
inline ResidualReport check_dynamics(const FieldHistory& h, const GridField& V) {
    h.require_central();
    require_same_grid(V, h.drifts[h.middle()].b);
    const GridField resid = mean_acceleration(h) + osmotic_acceleration(h) + gradient(V);
    const GridField zero = 0.0 * resid;
    return reduce_residual(ResidualFields{resid, zero});
}

inline ResidualReport check_dynamics(const DriftPair& d, const DriftPair& ddt,
                                     const GridField& V) {
    require_same_grid(V, d.b);
    const GridField resid = mean_acceleration(d, ddt) + osmotic_acceleration(d) + gradient(V);
    const GridField zero = 0.0 * resid;
    return reduce_residual(ResidualFields{resid, zero});
}

} // namespace stochmech
