// Batch harness: every check and simulation as a subcommand, driven by flags
// or an INI-style config file, writing CSV/JSON artifacts into --out.
// Exit codes: 0 all tolerances met, 1 a tolerance failed, 2 bad configuration.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stochmech/acceptance.hpp"
#include "stochmech/common.hpp"
#include "stochmech/equivalence.hpp"
#include "stochmech/fokker_planck.hpp"
#include "stochmech/io.hpp"
#include "stochmech/kinematics.hpp"
#include "stochmech/montecarlo.hpp"
#include "stochmech/params.hpp"
#include "stochmech/states.hpp"

namespace fs = std::filesystem;
using namespace stochmech;

namespace {

struct CommonOpts {
    std::uint64_t seed = kDefaultSeed;
    std::string out = "out";
    std::vector<double> grid_spec; // n, x_min, x_max
    bool quick = false;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--seed", c.seed, "Master seed (default " + std::to_string(kDefaultSeed) + ")");
    cmd->add_option("--out", c.out, "Artifact directory")->capture_default_str();
    cmd->add_option("--grid", c.grid_spec, "Grid as N,XMIN,XMAX")->delimiter(',')->expected(3);
    cmd->add_flag("--quick", c.quick, "Reduced sampling for fast runs");
}

Grid make_grid(const CommonOpts& c, int def_n, double def_lo, double def_hi) {
    if (c.grid_spec.empty()) return Grid(def_lo, def_hi, def_n);
    const int n = static_cast<int>(c.grid_spec[0]);
    if (n < 3 || c.grid_spec[0] != n)
        throw CLI::ValidationError("--grid", "N must be an integer >= 3");
    return Grid(c.grid_spec[1], c.grid_spec[2], n);
}

CatalogState state_by_name(const std::string& name) {
    if (name == "ho_ground") return ho_ground(1.0);
    if (name == "ho_coherent") return ho_coherent(1.0, 1.0);
    if (name == "free_gaussian") return free_gaussian(0.0, 1.0, 1.0);
    throw CLI::ValidationError("--state", "unknown state '" + name + "'");
}

std::vector<double> default_times(const std::string& name) {
    if (name == "ho_ground") return {0.0};
    if (name == "ho_coherent") return {0.3, 0.7, 1.1};
    return {0.2, 0.7, 1.3};
}

InitSampler initial_sampler(const std::string& name) {
    if (name == "ho_ground") return gaussian_sampler(0.0, std::sqrt(0.5));
    if (name == "ho_coherent") return gaussian_sampler(1.0, std::sqrt(0.5));
    return gaussian_sampler(0.0, 1.0); // free_gaussian, sigma0 = 1
}

// nu values from exactly one of --nu / --beta.
std::vector<double> resolve_nus(const std::vector<double>& nus,
                                const std::vector<double>& betas) {
    if (!nus.empty() && !betas.empty())
        throw CLI::ValidationError("--nu/--beta", "give exactly one of --nu and --beta");
    if (!nus.empty()) return nus;
    std::vector<double> out;
    if (betas.empty()) return {0.25, 0.5, 1.0, 2.0};
    for (double b : betas) out.push_back(params_from_beta(1.0, 1.0, b).nu);
    return out;
}

int run_theorem(const CommonOpts& common, const std::string& state_name,
                std::vector<double> zs, std::vector<double> times, double perturb) {
    for (double z : zs)
        if (!(z > 0.0)) throw CLI::ValidationError("--z", "z must be > 0");
    const CatalogState st = state_by_name(state_name);
    if (times.empty()) times = default_times(state_name);
    const Grid g = make_grid(common, 401, -8.0, 8.0);
    fs::create_directories(common.out);
    JsonlWriter out(fs::path(common.out) / "theorem_reports.jsonl");

    const GridField V = st.potential(g);
    const GridField gx4 = make_field(g, [](double x) { return x * x * x * x; });
    bool ok = true;
    for (double t : times) {
        WavePolar w = st.sample(g, t);
        if (perturb != 0.0) {
            GridField R = w.R + perturb * gx4;
            const double logmass =
                0.5 * std::log(trapezoid(map_field(R, [](double r) { return std::exp(2.0 * r); })));
            R = map_field(R, [logmass](double r) { return r - logmass; });
            w = WavePolar{R, w.S};
            validate_wave(w);
        }
        const WaveDot dot = st.sample_dot(g, t);
        const ResidualFields f1 = residual_fields_eq1(w, dot, V, 1.0, 1.0);
        const ResidualReport r1 = reduce_residual(f1);
        const double scale = max_abs(V, 1) + max_abs(dot.dS, 1) + 1.0;
        const double gate = 5.0 * g.h() * g.h() * scale;
        ok = ok && r1.max_abs_real <= gate && r1.max_abs_imag <= gate;
        {
            ModelParams p1 = params_from_z(1.0, 1.0, 1.0);
            nlohmann::ordered_json j = report_json("residual_eq1", p1, r1, g);
            j["state"] = state_name;
            j["t"] = t;
            j["gate"] = gate;
            out.write(j);
        }
        for (double z : zs) {
            const ModelParams p = params_from_z(1.0, 1.0, z);
            const ResidualFields f2 = residual_fields_eq2(w, dot, V, p);
            const ResidualReport r2 = reduce_residual(f2);
            double dre = 0.0, dim = 0.0;
            for (int i = 1; i + 1 < g.n(); ++i) {
                dre = std::max(dre, std::abs(f2.real[i] - f1.real[i]));
                dim = std::max(dim, std::abs(f2.imag[i] - z * f1.imag[i]));
            }
            const bool pass = r2.max_abs_real <= gate * std::max(1.0, z * z) &&
                              dre <= 1e-12 && dim <= 1e-12;
            if (!pass) {
                std::cerr << "theorem: failed for state=" << state_name << " t=" << t
                          << " z=" << z << " (max_abs_real=" << r2.max_abs_real
                          << ", identity=" << dre << "/" << dim << ")\n";
                ok = false;
            }
            nlohmann::ordered_json j = report_json("residual_eq2", p, r2, g);
            j["state"] = state_name;
            j["t"] = t;
            j["real_mismatch"] = dre;
            j["imag_mismatch"] = dim;
            j["pass"] = pass;
            out.write(j);
        }
    }
    if (!ok) std::cerr << "theorem: tolerance violated\n";
    return ok ? 0 : 1;
}

int run_dynamics(const CommonOpts& common, const std::string& state_name,
                 const std::vector<double>& betas, std::vector<double> times) {
    const CatalogState st = state_by_name(state_name);
    if (times.empty()) times = default_times(state_name);
    const Grid g = make_grid(common, 401, -8.0, 8.0);
    fs::create_directories(common.out);
    JsonlWriter out(fs::path(common.out) / "dynamics_reports.jsonl");

    const GridField V = st.potential(g);
    const double scale = std::max(1.0, max_abs(gradient(V), 1));
    const double gate = 5.0 * g.h() * g.h() * scale;
    bool ok = true;
    for (double t : times) {
        const WavePolar w = st.sample(g, t);
        for (double beta : betas) {
            const ModelParams p = params_from_beta(1.0, 1.0, beta); // throws for beta >= 2
            const DriftPair d = make_drifts(w, p);
            const DriftPair ddt = drift_time_derivative(st, g, t, p);
            const ResidualReport r = check_dynamics(d, ddt, V);
            const bool pass = r.max_abs_real <= gate;
            if (!pass) {
                std::cerr << "dynamics: residual " << r.max_abs_real << " > " << gate
                          << " for beta=" << beta << " t=" << t << "\n";
                ok = false;
            }
            nlohmann::ordered_json j = report_json("check_dynamics", p, r, g);
            j["state"] = state_name;
            j["t"] = t;
            j["gate"] = gate;
            j["pass"] = pass;
            out.write(j);
        }
    }
    return ok ? 0 : 1;
}

int run_simulate(const CommonOpts& common, const std::string& state_name,
                 const std::vector<double>& nu_opt, const std::vector<double>& beta_opt,
                 int paths, double dt, double t_final, std::vector<double> bin_spec) {
    const CatalogState st = state_by_name(state_name);
    const std::vector<double> nus = resolve_nus(nu_opt, beta_opt);
    const Grid g = make_grid(common, 2001, -10.0, 10.0);
    Bins bins{-10.0, 10.0, 80};
    if (!bin_spec.empty()) {
        if (bin_spec.size() != 3)
            throw CLI::ValidationError("--bins", "expected N,LO,HI");
        bins = Bins{bin_spec[1], bin_spec[2], static_cast<int>(bin_spec[0])};
    }
    if (common.quick) paths = std::min(paths, 20000);
    const int steps = std::max(1, static_cast<int>(std::lround(t_final / dt)));
    fs::create_directories(common.out);
    write_state_csv(fs::path(common.out) / ("state_" + state_name + ".csv"),
                    st.sample(g, 0.0));
    JsonlWriter out(fs::path(common.out) / "simulate_summary.jsonl");

    bool ok = true;
    int i = 0;
    for (double nu : nus) {
        const ModelParams p = params_from_nu(1.0, 1.0, nu);
        SimConfig sim;
        sim.dt = dt;
        sim.steps = steps;
        sim.n_paths = paths;
        sim.seed = derive_seed(common.seed, 40 + i);
        sim.record_stride = std::max(1, steps / 10);
        FieldDrift drift(st, g, p, dt);
        const Ensemble e = simulate(std::ref(drift), p, initial_sampler(state_name), sim);
        const int last = static_cast<int>(e.positions.size()) - 1;
        const BinnedEstimate hist = empirical_density(e, last, bins);
        // exact single-time density of the catalog state at t_final
        const double tf = steps * dt;
        auto rho_exact = [&](double x) {
            return std::exp(2.0 * st.R(x, tf));
        };
        const double l1 = l1_to_density(hist, rho_exact);
        const double tol =
            paths >= 100000 ? 0.02 : 0.02 * std::sqrt(100000.0 / paths) + 0.005;
        const bool pass = l1 <= tol;
        if (!pass) {
            std::cerr << "simulate: L1 " << l1 << " > " << tol << " at nu=" << nu << "\n";
            ok = false;
        }
        write_density_csv(fs::path(common.out) / ("density_nu" + format_double(nu) + ".csv"),
                          hist);
        write_ensemble_summary_csv(
            fs::path(common.out) / ("ensemble_nu" + format_double(nu) + ".csv"), e);
        nlohmann::ordered_json j;
        j["check"] = "simulate";
        j["state"] = state_name;
        j["nu"] = nu;
        j["z"] = p.z;
        j["paths"] = paths;
        j["t_final"] = tf;
        j["var"] = sample_variance(e.positions[last]);
        j["l1_to_catalog"] = l1;
        j["tol"] = tol;
        j["pass"] = pass;
        out.write(j);
        ++i;
    }
    return ok ? 0 : 1;
}

int run_fokker(const CommonOpts& common, const std::string& state_name, double y,
               const std::vector<double>& nu_opt, const std::vector<double>& beta_opt,
               double dt, double t_final, double eps) {
    if (state_name != "ho_ground")
        throw CLI::ValidationError("--state",
                                   "transition solves need a real stationary state (ho_ground)");
    const CatalogState st = state_by_name(state_name);
    const std::vector<double> nus = resolve_nus(nu_opt, beta_opt);
    const Grid g = make_grid(common, 601, -6.0, 6.0);
    const WavePolar w = st.sample(g, 0.0);
    const GridField rho = w.rho();
    fs::create_directories(common.out);
    JsonlWriter out(fs::path(common.out) / "fokker_summary.jsonl");

    bool ok = true;
    for (double nu : nus) {
        const ModelParams p = params_from_nu(1.0, 1.0, nu);
        const double theta = p.z;
        const double T = t_final > 0.0 ? t_final : 10.0 / theta;
        const int steps = std::max(1, static_cast<int>(std::lround(T / dt)));
        const int stride = std::max(1, steps / 100);
        DensityTrack track = transition_density(w, p, y, dt, steps, eps, stride);
        for (const auto& warning : track.warnings)
            std::cerr << "fokker: warning: " << warning << "\n";
        const double used_eps =
            eps > 0.0 ? eps : std::max(2.0 * g.h(), 0.02 * (g.x_max() - g.x_min()));
        bool pass = track.max_step_mass_drift <= 1e-10;
        for (int s = 0; s < track.n_slices(); ++s) {
            const double t = track.times[s];
            if (t <= 0.0) continue;
            const OuMoments oracle = ou_transition_oracle(theta, 2.0 * nu, y, t);
            const double vexp = oracle.variance + used_eps * used_eps * std::exp(-2.0 * theta * t);
            if (std::abs(slice_mean(track, s) - oracle.mean) > 1e-3 ||
                std::abs(slice_variance(track, s) - vexp) > 1e-3)
                pass = false;
        }
        const std::vector<double> l1s = equilibrium_check(track, rho);
        if (T >= 10.0 / theta && l1s.back() > 1e-3) pass = false;
        if (!pass) {
            std::cerr << "fokker: tolerance violated at nu=" << nu << "\n";
            ok = false;
        }
        write_track_csv(fs::path(common.out) / ("transition_nu" + format_double(nu) + ".csv"),
                        track);
        nlohmann::ordered_json j = track_summary_json(p, y, track, rho);
        j["check"] = "transition";
        j["eps"] = used_eps;
        j["pass"] = pass;
        out.write(j);
    }
    return ok ? 0 : 1;
}

int run_acceptance_cmd(const CommonOpts& common) {
    AcceptanceConfig cfg;
    cfg.seed = common.seed;
    cfg.out_dir = common.out;
    cfg.quick = common.quick;
    const auto results = run_acceptance(cfg);
    print_acceptance_table(results, std::cout);
    return all_pass(results) ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochmech: diffusion-process laboratory for wave mechanics"};
    app.require_subcommand(1);
    app.fallthrough(); // lets --config appear after the subcommand name
    app.set_config("--config", "", "INI config file with [subcommand] sections");
    app.allow_config_extras(false);

    CommonOpts common;

    auto* theorem = app.add_subcommand("theorem", "residuals of the scaled/unscaled equations");
    std::string state = "ho_ground";
    std::vector<double> zs{0.5, 1.0, 2.0, 4.0};
    std::vector<double> times;
    double perturb = 0.0;
    add_common(theorem, common);
    theorem->add_option("--state", state, "ho_ground | ho_coherent | free_gaussian")
        ->capture_default_str();
    theorem->add_option("--z", zs, "scaling parameters")->delimiter(',');
    theorem->add_option("--t", times, "time points")->delimiter(',');
    theorem->add_option("--perturb", perturb, "add amp*x^4 to R before checking");

    auto* dynamics = app.add_subcommand("dynamics", "generalized dynamical-law residuals");
    std::string dstate = "ho_ground";
    std::vector<double> betas{-2.0, 0.0, 1.0, 1.5};
    std::vector<double> dtimes;
    add_common(dynamics, common);
    dynamics->add_option("--state", dstate)->capture_default_str();
    dynamics->add_option("--beta", betas, "beta ladder (< 2)")->delimiter(',');
    dynamics->add_option("--t", dtimes, "time points")->delimiter(',');

    auto* simulate_cmd = app.add_subcommand("simulate", "sample-path ensembles and densities");
    std::string sstate = "ho_ground";
    std::vector<double> snus, sbetas, sbins;
    int paths = 100000;
    double sdt = 1e-3, st_final = 1.0;
    add_common(simulate_cmd, common);
    simulate_cmd->add_option("--state", sstate)->capture_default_str();
    simulate_cmd->add_option("--nu", snus, "diffusion constants")->delimiter(',');
    simulate_cmd->add_option("--beta", sbetas, "betas (alternative to --nu)")->delimiter(',');
    simulate_cmd->add_option("--paths", paths)->capture_default_str();
    simulate_cmd->add_option("--dt", sdt)->capture_default_str();
    simulate_cmd->add_option("--t-final", st_final)->capture_default_str();
    simulate_cmd->add_option("--bins", sbins, "histogram as N,LO,HI")->delimiter(',');

    auto* fokker = app.add_subcommand("fokker", "transition-density solves vs the OU oracle");
    std::string fstate = "ho_ground";
    std::vector<double> fnus{0.5, 2.0}, fbetas;
    double y = 1.0, fdt = 1e-3, ft_final = 0.0, feps = 0.0;
    add_common(fokker, common);
    fokker->add_option("--state", fstate)->capture_default_str();
    fokker->add_option("--y", y, "start point of the transition")->capture_default_str();
    fokker->add_option("--nu", fnus, "diffusion constants")->delimiter(',');
    fokker->add_option("--beta", fbetas, "betas (alternative to --nu)")->delimiter(',');
    fokker->add_option("--dt", fdt)->capture_default_str();
    fokker->add_option("--t-final", ft_final, "horizon (default 10 relaxation times)");
    fokker->add_option("--eps", feps, "initial mollifier width (default max(2h, 2% domain))");

    auto* acceptance = app.add_subcommand("acceptance", "run the full verification ladder");
    add_common(acceptance, common);

    CLI11_PARSE(app, argc, argv);

    try {
        if (theorem->parsed()) return run_theorem(common, state, zs, times, perturb);
        if (dynamics->parsed()) return run_dynamics(common, dstate, betas, dtimes);
        if (simulate_cmd->parsed())
            return run_simulate(common, sstate, snus, sbetas, paths, sdt, st_final, sbins);
        if (fokker->parsed())
            return run_fokker(common, fstate, y, fnus, fbetas, fdt, ft_final, feps);
        if (acceptance->parsed()) return run_acceptance_cmd(common);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
