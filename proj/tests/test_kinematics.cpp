#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "stochmech/grid2d.hpp"
#include "stochmech/kinematics.hpp"
#include "stochmech/states.hpp"

using namespace stochmech;
using Catch::Approx;

namespace {

ScalarHistory constant_history(const GridField& f, double dt) {
    return ScalarHistory{{f, f, f}, dt};
}

} // namespace

TEST_CASE("harmonic ground drifts are -zx and +zx") {
    const Grid g(-5.5, 5.5, 221);
    const WavePolar w = ho_ground(1.0).sample(g, 0.0);
    for (double nu : {0.25, 0.5, 1.0, 2.0}) {
        const ModelParams p = params_from_nu(1.0, 1.0, nu);
        const DriftPair d = make_drifts(w, p);
        for (int i = 0; i < g.n(); ++i) {
            CHECK(d.b[i] == Approx(-p.z * g.x(i)).margin(1e-10));
            CHECK(d.b_star[i] == Approx(p.z * g.x(i)).margin(1e-10));
        }
    }
}

TEST_CASE("drift-pair invariants hold on every catalog state and nu") {
    const Grid g(-6.5, 6.5, 401);
    for (const auto& [st, t] : {std::pair{ho_ground(1.0), 0.0},
                                std::pair{ho_coherent(1.0, 1.0), 0.8},
                                std::pair{free_gaussian(0.0, 1.0, 1.0), 0.8}}) {
        const WavePolar w = st.sample(g, t);
        const GridField gR = gradient(w.R), gS = gradient(w.S);
        for (double nu : {0.25, 0.5, 1.0, 2.0}) {
            const ModelParams p = params_from_nu(1.0, 1.0, nu);
            const DriftPair d = make_drifts(w, p);
            // (b - b*)/2 = 2 nu grad R
            CHECK(max_abs(0.5 * (d.b - d.b_star) - 2.0 * p.nu * gR) < 1e-12);
            // b - 2 nu grad R = (hbar/m) grad S, independent of nu
            CHECK(max_abs(d.b - 2.0 * p.nu * gR - (p.hbar / p.mass) * gS) < 1e-12);
        }
        // linearity in nu: the current part cancels in differences
        const DriftPair d1 = make_drifts(w, params_from_nu(1.0, 1.0, 0.25));
        const DriftPair d2 = make_drifts(w, params_from_nu(1.0, 1.0, 2.0));
        CHECK(max_abs(d1.b - d2.b - (2.0 * (0.25 - 2.0)) * gR) < 1e-12);
    }
}

TEST_CASE("free packet drift at the center is p0/m for every nu") {
    const Grid g(-8.0, 8.0, 801);
    const WavePolar w = free_gaussian(0.0, 1.0, 1.0).sample(g, 0.0);
    const int center = 400; // x = 0, where grad R vanishes
    for (double nu : {0.25, 0.5, 1.0, 2.0}) {
        const DriftPair d = make_drifts(w, params_from_nu(1.0, 1.0, nu));
        CHECK(d.b[center] == Approx(1.0).margin(1e-10));
    }
}

TEST_CASE("coherent-state drift at the packet center is the classical velocity") {
    const Grid g(-7.0, 7.0, 1401);
    const CatalogState st = ho_coherent(1.0, 1.0);
    for (double t : {0.0, 0.9, 2.2}) {
        for (double nu : {0.25, 1.0, 2.0}) {
            // evaluate analytically: grad R = 0 at x_c, so b = (hbar/m) dS/dx
            const ModelParams p = params_from_nu(1.0, 1.0, nu);
            const double xc = std::cos(t);
            const double b_center =
                2.0 * p.nu * st.dR_dx(xc, t) + p.hbar / p.mass * st.dS_dx(xc, t);
            CHECK(b_center == Approx(-std::sin(t)).margin(1e-12));
        }
    }
}

TEST_CASE("D and D* act on the coordinate and constants as expected") {
    const Grid g(-5.5, 5.5, 221);
    const WavePolar w = ho_ground(1.0).sample(g, 0.0);
    const ModelParams p = params_from_nu(1.0, 1.0, 1.0); // z = 2
    const DriftPair d = make_drifts(w, p);
    const GridField x = make_field(g, [](double u) { return u; });
    const GridField c = make_field(g, [](double) { return 1.0; });

    const GridField Dx = apply_D(constant_history(x, 1e-3), d);
    const GridField Dsx = apply_Dstar(constant_history(x, 1e-3), d);
    CHECK(max_abs(Dx - d.b) < 1e-10);
    CHECK(max_abs(Dsx - d.b_star) < 1e-10);
    CHECK(max_abs(apply_D(constant_history(c, 1e-3), d)) < 1e-12);
    CHECK(max_abs(apply_Dstar(constant_history(c, 1e-3), d)) < 1e-12);

    // D D* x = -z^2 x for the stationary oscillator
    const GridField DDsx = apply_D(constant_history(Dsx, 1e-3), d);
    for (int i = 1; i + 1 < g.n(); ++i)
        CHECK(DDsx[i] == Approx(-4.0 * g.x(i)).margin(1e-9));
}

TEST_CASE("histories must have an odd slice count of at least three") {
    const Grid g(-5.0, 5.0, 101);
    const GridField x = make_field(g, [](double u) { return u; });
    const WavePolar w = ho_ground(1.0).sample(g, 0.0);
    const DriftPair d = make_drifts(w, params_from_nu(1.0, 1.0, 1.0));
    CHECK_THROWS_AS(apply_D(ScalarHistory{{x, x}, 1e-3}, d), std::invalid_argument);
    CHECK_THROWS_AS(apply_D(ScalarHistory{{x}, 1e-3}, d), std::invalid_argument);
    CHECK_THROWS_AS(apply_D(ScalarHistory{{x, x, x}, 0.0}, d), std::invalid_argument);
}

TEST_CASE("mean acceleration of the harmonic ground state") {
    const Grid g(-5.5, 5.5, 221);
    const CatalogState st = ho_ground(1.0);
    const WavePolar w = st.sample(g, 0.0);
    SECTION("beta = 0 recovers -grad V directly") {
        const ModelParams p = params_from_beta(1.0, 1.0, 0.0);
        const GridField acc = mean_acceleration(
            make_drifts(w, p), drift_time_derivative(st, g, 0.0, p));
        for (int i = 1; i + 1 < g.n(); ++i)
            CHECK(acc[i] == Approx(-g.x(i)).margin(1e-9));
    }
    SECTION("z = 2 separates mean and osmotic parts") {
        const ModelParams p = params_from_nu(1.0, 1.0, 1.0);
        const GridField acc = mean_acceleration(
            make_drifts(w, p), drift_time_derivative(st, g, 0.0, p));
        for (int i = 1; i + 1 < g.n(); ++i)
            CHECK(acc[i] == Approx(-4.0 * g.x(i)).margin(1e-9)); // not -grad V alone
    }
}

TEST_CASE("wide free packet: mean acceleration vanishes at the center") {
    const Grid g(-30.0, 30.0, 3001);
    const CatalogState st = free_gaussian(0.0, 0.0, 5.0);
    const ModelParams p = params_from_nu(1.0, 1.0, 0.5);
    const WavePolar w = st.sample(g, 0.0);
    const GridField acc = mean_acceleration(
        make_drifts(w, p), drift_time_derivative(st, g, 0.0, p));
    CHECK(std::abs(acc[1500]) < 1e-6);
}

TEST_CASE("osmotic acceleration: operator route equals both gradient routes") {
    const Grid g(-6.5, 6.5, 401);
    const WavePolar w = ho_ground(1.0).sample(g, 0.0);
    const ModelParams p = params_from_beta(1.0, 1.0, 1.5); // z = 2, nu = 1
    const DriftPair d = make_drifts(w, p);
    const GridField op = osmotic_acceleration(d);
    const GridField grad_route = osmotic_acceleration_gradient_route(w.R, p);
    // closed form: (beta/8) * 16 nu^2 x = 3x
    for (int i = 2; i + 2 < g.n(); ++i) {
        CHECK(op[i] == Approx(3.0 * g.x(i)).margin(1e-9));
        CHECK(grad_route[i] == Approx(3.0 * g.x(i)).margin(1e-9));
    }
    CHECK(max_abs(op - grad_route, 2) < 1e-9);

    const ModelParams p0 = params_from_beta(1.0, 1.0, 0.0);
    CHECK(max_abs(osmotic_acceleration(make_drifts(w, p0))) < 1e-14);
}

TEST_CASE("osmotic two-route disagreement through sqrt(rho) converges at O(h^2)") {
    const ModelParams p = params_from_beta(1.0, 1.0, 1.5);
    for (auto [st, t] : {std::pair{ho_ground(1.0), 0.0},
                         std::pair{free_gaussian(0.0, 1.0, 1.0), 0.7}}) {
        double err[2];
        int k = 0;
        for (int n : {201, 401}) {
            const Grid g(-6.5, 6.5, n);
            const WavePolar w = st.sample(g, t);
            err[k++] = max_abs(osmotic_acceleration(make_drifts(w, p)) -
                                   osmotic_acceleration_sqrt_rho_route(w.R, p),
                               2);
        }
        CHECK(err[0] / err[1] == Approx(4.0).epsilon(0.2));
    }
}

TEST_CASE("generalized dynamics holds for every beta on the same state data") {
    const Grid g(-6.5, 6.5, 401);
    const CatalogState st = ho_ground(1.0);
    const WavePolar w = st.sample(g, 0.0);
    const GridField V = st.potential(g);
    for (double beta : {-2.0, 0.0, 1.0, 1.5}) {
        const ModelParams p = params_from_beta(1.0, 1.0, beta);
        const ResidualReport r =
            check_dynamics(make_drifts(w, p), drift_time_derivative(st, g, 0.0, p), V);
        CHECK(r.max_abs_real < 1e-9);
    }
}

TEST_CASE("generalized dynamics on time-dependent states via histories") {
    const double bound_scale = 5.0;
    for (const auto& [st, times] :
         {std::pair<CatalogState, std::vector<double>>{ho_coherent(1.0, 1.0),
                                                       {0.0, std::numbers::pi / 4, std::numbers::pi / 2}},
          std::pair<CatalogState, std::vector<double>>{free_gaussian(0.0, 1.0, 1.0),
                                                       {0.3, 0.9}}}) {
        const Grid g(-6.5, 6.5, 401);
        const GridField V = st.potential(g);
        const double scale = std::max(1.0, max_abs(gradient(V), 1));
        for (double t : times) {
            for (double beta : {0.0, 1.5}) {
                const ModelParams p = params_from_beta(1.0, 1.0, beta);
                const FieldHistory h = history_from_catalog(st, g, t, 1e-3, p);
                const ResidualReport r = check_dynamics(h, V);
                CHECK(r.max_abs_real <= bound_scale * g.h() * g.h() * scale);
            }
        }
    }
}

TEST_CASE("for stationary states D x + D* x is twice the current velocity") {
    const Grid g(-7.0, 7.0, 701);
    const CatalogState st = ho_coherent(1.0, 1.0);
    const WavePolar w = st.sample(g, 0.8);
    const ModelParams p = params_from_nu(1.0, 1.0, 0.7);
    const DriftPair d = make_drifts(w, p);
    const GridField gS = gradient(w.S);
    CHECK(max_abs(d.b + d.b_star - (2.0 * p.hbar / p.mass) * gS) < 1e-12);
}

TEST_CASE("osmotic-current split vanishes linearly as nu -> 0") {
    const Grid g(-6.5, 6.5, 401);
    const WavePolar w = free_gaussian(0.0, 1.0, 1.0).sample(g, 0.5);
    const double slope = max_abs(gradient(w.R)) * 4.0;
    for (double nu : {1e-3, 1e-2, 1e-1, 1.0}) {
        const DriftPair d = make_drifts(w, params_from_nu(1.0, 1.0, nu));
        CHECK(max_abs(d.b - d.b_star) == Approx(slope * nu).epsilon(1e-10));
    }
}

TEST_CASE("2-D curl check") {
    const Grid2D g{Grid(-2.0, 2.0, 81), Grid(-2.0, 2.0, 81)};
    SECTION("gradient fields are curl-free") {
        const GridField2D vx = make_field_2d(g, [](double x, double) { return 2.0 * x; });
        const GridField2D vy = make_field_2d(g, [](double, double y) { return 2.0 * y; });
        CHECK(check_curl_2d(vx, vy) < 1e-12);
    }
    SECTION("a rotational field is detected") {
        const GridField2D vx = make_field_2d(g, [](double, double y) { return -y; });
        const GridField2D vy = make_field_2d(g, [](double x, double) { return x; });
        CHECK(check_curl_2d(vx, vy) == Approx(2.0).margin(1e-12));
    }
    SECTION("smooth gradient field: curl decays at O(h^2)") {
        double err[2];
        int k = 0;
        for (int n : {41, 81}) {
            const Grid2D gg{Grid(-2.0, 2.0, n), Grid(-2.0, 2.0, n)};
            const GridField2D vx =
                make_field_2d(gg, [](double x, double y) { return std::cos(x) * std::cos(y); });
            const GridField2D vy =
                make_field_2d(gg, [](double x, double y) { return -std::sin(x) * std::sin(y); });
            err[k++] = check_curl_2d(vx, vy);
        }
        CHECK(err[0] / err[1] == Approx(4.0).epsilon(0.2));
    }
    SECTION("product harmonic ground drifts are curl-free") {
        // separable R(x,y); b + b* = 2 (hbar/m) grad S = 0 for the real ground
        // state, so check the osmotic component of b itself
        const GridField2D R = make_field_2d(g, [](double x, double y) {
            return -0.5 * (x * x + y * y);
        });
        const GridField2D bx = partial_x(R);
        const GridField2D by = partial_y(R);
        CHECK(check_curl_2d(bx, by) < 1e-10);
    }
    SECTION("shape mismatch is rejected") {
        const Grid2D other{Grid(-2.0, 2.0, 41), Grid(-2.0, 2.0, 81)};
        const GridField2D vx = make_field_2d(g, [](double, double) { return 0.0; });
        const GridField2D vy = make_field_2d(other, [](double, double) { return 0.0; });
        CHECK_THROWS_AS(check_curl_2d(vx, vy), std::invalid_argument);
    }
}
