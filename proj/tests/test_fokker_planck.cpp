#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "stochmech/fokker_planck.hpp"
#include "stochmech/states.hpp"

using namespace stochmech;
using Catch::Approx;

TEST_CASE("OU oracle closed form") {
    const OuMoments at0 = ou_transition_oracle(2.0, 2.0, 1.0, 0.0);
    CHECK(at0.mean == 1.0);
    CHECK(at0.variance == 0.0);

    const OuMoments m = ou_transition_oracle(2.0, 2.0, 1.0, 0.5);
    CHECK(m.mean == Approx(0.36787944117144233).epsilon(1e-14));
    CHECK(m.variance == Approx(0.43233235838169365).epsilon(1e-14));

    // t -> infinity limit is the quantum variance hbar/(2 m w), nu-independent
    for (double nu : {0.5, 1.0, 2.0}) {
        const double theta = 2.0 * nu; // z * omega at hbar = m = omega = 1
        const OuMoments inf = ou_transition_oracle(theta, 2.0 * nu, 1.0, 50.0);
        CHECK(inf.mean == Approx(0.0).margin(1e-12));
        CHECK(inf.variance == Approx(0.5).epsilon(1e-10));
    }

    CHECK_THROWS_AS(ou_transition_oracle(0.0, 2.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ou_transition_oracle(2.0, 2.0, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("the sampled stationary density is a fixed point of the solver") {
    const Grid g(-6.0, 6.0, 601);
    const WavePolar w = ho_ground(1.0).sample(g, 0.0);
    const ModelParams p = params_from_nu(1.0, 1.0, 1.0); // z = 2
    const GridField rho = w.rho();
    const DriftFn ou = [&p](double x, double) { return -p.z * x; };
    const DensityTrack track = solve_forward(ou, p, rho, 1e-3, 5000, 500);
    CHECK(track.max_step_mass_drift <= 1e-10);
    for (double l1 : equilibrium_check(track, rho)) CHECK(l1 <= 1e-6);
}

TEST_CASE("variance relaxation matches the OU recursion") {
    const Grid g(-6.0, 6.0, 601);
    const ModelParams p = params_from_nu(1.0, 1.0, 1.0); // z = 2
    const double s0sq = 0.1;
    const GridField init = make_field(g, [&](double x) {
        return std::exp(-x * x / (2.0 * s0sq)) / std::sqrt(2.0 * std::numbers::pi * s0sq);
    });
    const DriftFn ou = [&p](double x, double) { return -p.z * x; };
    const DensityTrack track = solve_forward(ou, p, init, 1e-3, 1000, 100);
    for (double t : {0.1, 0.5, 1.0}) {
        const int i = track.index_at(t);
        const double expected = 0.5 + (s0sq - 0.5) * std::exp(-2.0 * p.z * t);
        CHECK(slice_variance(track, i) == Approx(expected).margin(1e-3));
    }
}

TEST_CASE("forward solves propagate |psi|^2 for the free packet, any nu") {
    const Grid g(-8.0, 8.0, 801);
    const CatalogState st = free_gaussian(0.0, 1.0, 1.0);
    const GridField rho0 = st.sample(g, 0.0).rho();
    const GridField rho1 = st.sample(g, 1.0).rho();
    for (double nu : {0.5, 2.0}) {
        const ModelParams p = params_from_nu(1.0, 1.0, nu);
        const DriftFn drift = catalog_drift(st, p);
        const DensityTrack track = solve_forward(drift, p, rho0, 1e-3, 1000, 1000);
        CHECK(track.max_step_mass_drift <= 1e-10);
        CHECK(l1_between(track.slice(track.n_slices() - 1), rho1) <= 1e-2);
    }
}

TEST_CASE("transition density matches the OU oracle and relaxes to rho") {
    const Grid g(-6.0, 6.0, 601);
    const WavePolar w = ho_ground(1.0).sample(g, 0.0);
    const GridField rho = w.rho();
    const double y = 1.0, dt = 1e-3;
    const double eps = std::max(2.0 * g.h(), 0.02 * 12.0);
    const ModelParams p = params_from_nu(1.0, 1.0, 1.0); // theta = z = 2
    const int steps = static_cast<int>(std::lround(10.0 / p.z / dt));
    const DensityTrack track = transition_density(w, p, y, dt, steps, eps, 50);
    CHECK(track.max_step_mass_drift <= 1e-10);
    for (double t : {0.25, 0.5, 1.0}) {
        const int i = track.index_at(t);
        const OuMoments oracle = ou_transition_oracle(p.z, 2.0 * p.nu, y, t);
        CHECK(slice_mean(track, i) == Approx(oracle.mean).margin(1e-3));
        const double vexp = oracle.variance + eps * eps * std::exp(-2.0 * p.z * t);
        CHECK(slice_variance(track, i) == Approx(vexp).margin(1e-3));
    }
    const std::vector<double> l1s = equilibrium_check(track, rho);
    CHECK(l1s.back() <= 1e-3);
    for (std::size_t i = 1; i + 1 < l1s.size(); ++i)
        CHECK(l1s[i + 1] <= l1s[i] + 1e-9); // monotone decay after the width transient

    // oracle agreement across start points
    for (double y2 : {-1.5, 0.5}) {
        const DensityTrack t2 = transition_density(w, p, y2, dt, 500, eps, 250);
        const int i = t2.index_at(0.5);
        const OuMoments oracle = ou_transition_oracle(p.z, 2.0 * p.nu, y2, 0.5);
        CHECK(slice_mean(t2, i) == Approx(oracle.mean).margin(1e-3));
        CHECK(slice_variance(t2, i) ==
              Approx(oracle.variance + eps * eps * std::exp(-2.0 * p.z * 0.5)).margin(1e-3));
    }
}

TEST_CASE("transition densities differ across nu while the limit does not") {
    const Grid g(-6.0, 6.0, 601);
    const WavePolar w = ho_ground(1.0).sample(g, 0.0);
    const GridField rho = w.rho();
    std::vector<GridField> at_contrast;
    for (double nu : {0.5, 2.0}) {
        const ModelParams p = params_from_nu(1.0, 1.0, nu);
        const int steps = static_cast<int>(std::lround(10.0 / p.z / 1e-3));
        const DensityTrack track = transition_density(w, p, 1.0, 1e-3, steps, 0.24, 50);
        at_contrast.push_back(track.slice(track.index_at(0.3)));
        CHECK(equilibrium_check(track, rho).back() <= 1e-3);
    }
    CHECK(l1_between(at_contrast[0], at_contrast[1]) >= 0.1);
}

TEST_CASE("transition solves reject non-stationary and malformed input") {
    const Grid g(-6.0, 6.0, 601);
    const ModelParams p = params_from_nu(1.0, 1.0, 1.0);
    // a moving packet has grad S != 0: not a real stationary state
    const WavePolar moving = free_gaussian(0.0, 3.0, 1.0).sample(g, 0.0);
    CHECK_THROWS_AS(transition_density(moving, p, 1.0, 1e-3, 100), std::invalid_argument);
    const WavePolar w = ho_ground(1.0).sample(g, 0.0);
    CHECK_THROWS_AS(transition_density(w, p, 1.0, 1e-3, 100, 0.5 * g.h()),
                    std::invalid_argument); // eps below 2h
    CHECK_THROWS_AS(transition_density(w, p, 5.9, 1e-3, 100), std::invalid_argument);
}

TEST_CASE("initial densities must be nonnegative and normalized") {
    const Grid g(-6.0, 6.0, 601);
    const ModelParams p = params_from_nu(1.0, 1.0, 1.0);
    const DriftFn ou = [](double x, double) { return -x; };
    const GridField negative = make_field(g, [](double x) { return x; });
    CHECK_THROWS_AS(solve_forward(ou, p, negative, 1e-3, 10), std::invalid_argument);
    const GridField unnormalized = make_field(g, [](double) { return 1.0; });
    CHECK_THROWS_AS(solve_forward(ou, p, unnormalized, 1e-3, 10), std::invalid_argument);
}

TEST_CASE("non-finite drifts surface as scheme errors") {
    const Grid g(-6.0, 6.0, 601);
    const WavePolar w = ho_ground(1.0).sample(g, 0.0);
    const ModelParams p = params_from_nu(1.0, 1.0, 1.0);
    const DriftFn broken = [](double x, double) {
        return x > 2.0 ? std::numeric_limits<double>::quiet_NaN() : -x;
    };
    CHECK_THROWS_AS(solve_forward(broken, p, w.rho(), 1e-3, 10), SchemeError);
}

TEST_CASE("a too-large time step earns a resolution warning") {
    const Grid g(-6.0, 6.0, 601);
    const WavePolar w = ho_ground(1.0).sample(g, 0.0);
    const ModelParams p = params_from_nu(1.0, 1.0, 1.0);
    const DriftFn ou = [&p](double x, double) { return -p.z * x; };
    const DensityTrack track = solve_forward(ou, p, w.rho(), 0.05, 10);
    CHECK(!track.warnings.empty());
    CHECK(track.index_at(0.05 * 10) == track.n_slices() - 1);
    CHECK_THROWS_AS(track.index_at(17.0), std::invalid_argument);
}
