#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "stochmech/equivalence.hpp"
#include "stochmech/fokker_planck.hpp"
#include "stochmech/montecarlo.hpp"
#include "stochmech/states.hpp"

namespace stochmech {

// Shortest representation that round-trips a double.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Comma-separated, header row, LF line endings, round-trip precision.
class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open " + path.string());
    }

    void header(const std::vector<std::string>& cols) {
        for (std::size_t i = 0; i < cols.size(); ++i)
            out_ << (i ? "," : "") << cols[i];
        out_ << "\n";
    }

    void row(const std::vector<double>& vals) {
        for (std::size_t i = 0; i < vals.size(); ++i)
            out_ << (i ? "," : "") << format_double(vals[i]);
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

// One JSON object per line.
class JsonlWriter {
public:
    explicit JsonlWriter(const std::filesystem::path& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open " + path.string());
    }

    void write(const nlohmann::ordered_json& j) { out_ << j.dump() << "\n"; }

private:
    std::ofstream out_;
};

inline nlohmann::ordered_json report_json(const std::string& check, const ModelParams& p,
                                          const ResidualReport& r, const Grid& g) {
    nlohmann::ordered_json j;
    j["check"] = check;
    j["z"] = p.z;
    j["beta"] = p.beta;
    j["nu"] = p.nu;
    j["max_abs_real"] = r.max_abs_real;
    j["max_abs_imag"] = r.max_abs_imag;
    j["l2_real"] = r.l2_real;
    j["l2_imag"] = r.l2_imag;
    j["grid_n"] = g.n();
    j["h"] = g.h();
    return j;
}

// Snapshot columns: x, R, S, rho.
inline void write_state_csv(const std::filesystem::path& path, const WavePolar& w) {
    CsvWriter csv(path);
    csv.header({"x", "R", "S", "rho"});
    const GridField rho = w.rho();
    for (int i = 0; i < w.grid().n(); ++i)
        csv.row({w.grid().x(i), w.R[i], w.S[i], rho[i]});
}

inline void write_density_csv(const std::filesystem::path& path, const BinnedEstimate& d) {
    CsvWriter csv(path);
    csv.header({"bin_center", "density", "stderr"});
    for (std::size_t i = 0; i < d.centers.size(); ++i)
        csv.row({d.centers[i], d.value[i], d.std_err[i]});
}

inline void write_drift_csv(const std::filesystem::path& path, const BinnedEstimate& fwd,
                            const BinnedEstimate& bwd) {
    if (fwd.centers.size() != bwd.centers.size())
        throw std::invalid_argument("write_drift_csv: bin mismatch");
    CsvWriter csv(path);
    csv.header({"bin_center", "b_hat", "b_star_hat", "stderr_fwd", "stderr_bwd", "count"});
    for (std::size_t i = 0; i < fwd.centers.size(); ++i)
        csv.row({fwd.centers[i], fwd.value[i], bwd.value[i], fwd.std_err[i], bwd.std_err[i],
                 static_cast<double>(fwd.count[i])});
}

inline void write_ensemble_summary_csv(const std::filesystem::path& path, const Ensemble& e) {
    CsvWriter csv(path);
    csv.header({"step", "time", "mean", "var", "n_paths"});
    for (std::size_t s = 0; s < e.positions.size(); ++s)
        csv.row({static_cast<double>(e.recorded_steps[s]), e.times[s],
                 sample_mean(e.positions[s]), sample_variance(e.positions[s]),
                 static_cast<double>(e.positions[s].size())});
}

inline void write_track_csv(const std::filesystem::path& path, const DensityTrack& t) {
    CsvWriter csv(path);
    csv.header({"time", "bin_center", "density"});
    for (int s = 0; s < t.n_slices(); ++s)
        for (int i = 0; i < t.grid.n(); ++i)
            csv.row({t.times[s], t.grid.x(i), t.densities[s][i]});
}

inline nlohmann::ordered_json track_summary_json(const ModelParams& p, double y,
                                                 const DensityTrack& t, const GridField& rho) {
    nlohmann::ordered_json j;
    j["nu"] = p.nu;
    j["z"] = p.z;
    j["y"] = y;
    j["times"] = t.times;
    j["l1_to_rho"] = equilibrium_check(t, rho);
    std::vector<double> means, vars;
    for (int i = 0; i < t.n_slices(); ++i) {
        means.push_back(slice_mean(t, i));
        vars.push_back(slice_variance(t, i));
    }
    j["mean"] = means;
    j["var"] = vars;
    return j;
}

} // namespace stochmech
