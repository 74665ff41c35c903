#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "stochmech/common.hpp"
#include "stochmech/grid.hpp"
#include "stochmech/kinematics.hpp"
#include "stochmech/params.hpp"
#include "stochmech/states.hpp"

namespace stochmech {

// Wiener convention: the noise in  dx = b dt + dW  has  E[dW^2] = 2 nu dt,
// matching the generator term nu * Laplacian in the forward/backward
// derivative operators.  (Much of the literature instead pairs nu * Lap with
// E[dW^2] = nu dt; every estimator and oracle here assumes the 2-nu form.)
using DriftFn = std::function<double(double x, double t)>;
using InitSampler = std::function<double(std::mt19937_64&)>;

struct SimConfig {
    double dt = 1e-3;
    int steps = 1000;
    int n_paths = 10000;
    std::uint64_t seed = kDefaultSeed;
    // Record every record_stride-th step (step 0 and the final step are
    // always kept).  1 keeps everything.
    int record_stride = 1;
};

// Positions of an ensemble of sample paths at recorded steps.  Layout:
// positions[slice][path].  Reproducible: path p draws from its own RNG
// stream derived from (seed, p), so results do not depend on how paths are
// scheduled.
struct Ensemble {
    ModelParams params;
    double dt = 0.0;
    std::uint64_t seed = 0;
    int steps = 0;
    int record_stride = 1;
    std::vector<int> recorded_steps;
    std::vector<double> times;
    std::vector<std::vector<double>> positions;

    int n_paths() const {
        return positions.empty() ? 0 : static_cast<int>(positions.front().size());
    }
};

inline InitSampler gaussian_sampler(double mean, double sd) {
    return [mean, sd](std::mt19937_64& gen) {
        std::normal_distribution<double> n(mean, sd);
        return n(gen);
    };
}

inline InitSampler delta_sampler(double x0) {
    return [x0](std::mt19937_64&) { return x0; };
}

// Euler-Maruyama:  x_{k+1} = x_k + b(x_k, t_k) dt + sqrt(2 nu dt) xi.
inline Ensemble simulate(const DriftFn& drift, const ModelParams& p,
                         const InitSampler& init, const SimConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("simulate: dt must be > 0");
    if (cfg.steps < 1) throw std::invalid_argument("simulate: steps must be >= 1");
    if (cfg.n_paths < 1) throw std::invalid_argument("simulate: n_paths must be >= 1");
    if (cfg.record_stride < 1)
        throw std::invalid_argument("simulate: record_stride must be >= 1");

    Ensemble e;
    e.params = p;
    e.dt = cfg.dt;
    e.seed = cfg.seed;
    e.steps = cfg.steps;
    e.record_stride = cfg.record_stride;
    for (int k = 0; k <= cfg.steps; ++k)
        if (k % cfg.record_stride == 0 || k == cfg.steps) {
            e.recorded_steps.push_back(k);
            e.times.push_back(k * cfg.dt);
        }
    e.positions.assign(e.recorded_steps.size(),
                       std::vector<double>(cfg.n_paths, 0.0));

    const double amp = std::sqrt(2.0 * p.nu * cfg.dt);
    for (int path = 0; path < cfg.n_paths; ++path) {
        std::mt19937_64 gen(derive_seed(cfg.seed, static_cast<std::uint64_t>(path)));
        std::normal_distribution<double> normal(0.0, 1.0);
        double x = init(gen);
        std::size_t slot = 0;
        if (e.recorded_steps[slot] == 0) e.positions[slot++][path] = x;
        for (int k = 0; k < cfg.steps; ++k) {
            x += drift(x, k * cfg.dt) * cfg.dt + amp * normal(gen);
            if (!std::isfinite(x))
                throw SimulationError("simulate: path " + std::to_string(path) +
                                      " became non-finite at step " + std::to_string(k + 1));
            if (slot < e.recorded_steps.size() && e.recorded_steps[slot] == k + 1)
                e.positions[slot++][path] = x;
        }
    }
    return e;
}

// Drift callback evaluated from the analytic spatial derivatives of a
// catalog state.
inline DriftFn catalog_drift(const CatalogState& st, const ModelParams& p) {
    return [st, p](double x, double t) {
        return 2.0 * p.nu * st.dR_dx(x, t) + p.hbar / p.mass * st.dS_dx(x, t);
    };
}

// Drift from grid-sampled fields: make_drifts is evaluated per time step on
// a fixed grid and queried by linear interpolation (clamped at the ends).
// Step times are quantized to the simulation dt; each step's table is built
// once and kept, so path-outer iteration costs one lookup per query.
// The lazy table cache is not synchronized: give each worker its own copy.
class FieldDrift {
public:
    FieldDrift(CatalogState st, Grid g, ModelParams p, double dt)
        : state_(std::move(st)), grid_(g), params_(p), dt_(dt) {}

    double operator()(double x, double t) const {
        const long key = std::lround(t / dt_);
        if (key < 0) throw std::invalid_argument("FieldDrift: negative time");
        if (static_cast<std::size_t>(key) >= tables_.size())
            tables_.resize(key + 1);
        std::vector<double>& table = tables_[key];
        if (table.empty())
            table = make_drifts(state_.sample(grid_, key * dt_), params_).b.values();
        const double u = (x - grid_.x_min()) / grid_.h();
        if (u <= 0.0) return table.front();
        if (u >= grid_.n() - 1) return table.back();
        const int i = static_cast<int>(u);
        const double w = u - i;
        return (1.0 - w) * table[i] + w * table[i + 1];
    }

private:
    CatalogState state_;
    Grid grid_;
    ModelParams params_;
    double dt_;
    mutable std::vector<std::vector<double>> tables_;
};

struct Bins {
    double lo = -10.0;
    double hi = 10.0;
    int n = 80;

    double width() const { return (hi - lo) / n; }
    double center(int i) const { return lo + (i + 0.5) * width(); }
    int index(double x) const {
        if (x < lo || x >= hi) return -1;
        int i = static_cast<int>((x - lo) / width());
        return i >= n ? n - 1 : i;
    }
};

// Per-bin estimate with standard error and occupancy.  Bins flagged as
// underpopulated carry NaN in `value` and `std_err`.
struct BinnedEstimate {
    std::vector<double> centers;
    std::vector<double> value;
    std::vector<double> std_err;
    std::vector<long> count;
    double bin_width = 0.0;
    long total = 0;
};

// Normalized histogram (probability/length) with multinomial standard
// errors.  All samples must fall inside the binned range.
inline BinnedEstimate empirical_density(const Ensemble& e, int slice, const Bins& bins) {
    if (slice < 0 || slice >= static_cast<int>(e.positions.size()))
        throw std::invalid_argument("empirical_density: no such recorded slice");
    const auto& xs = e.positions[slice];
    const long N = static_cast<long>(xs.size());
    std::vector<long> cnt(bins.n, 0);
    for (double x : xs) {
        const int i = bins.index(x);
        if (i < 0)
            throw std::invalid_argument("empirical_density: sample " + std::to_string(x) +
                                        " outside the binned range");
        ++cnt[i];
    }
    BinnedEstimate out;
    out.bin_width = bins.width();
    out.total = N;
    for (int i = 0; i < bins.n; ++i) {
        const double phat = static_cast<double>(cnt[i]) / N;
        out.centers.push_back(bins.center(i));
        out.value.push_back(phat / out.bin_width);
        out.std_err.push_back(std::sqrt(phat * (1.0 - phat) / N) / out.bin_width);
        out.count.push_back(cnt[i]);
    }
    return out;
}

namespace detail {

enum class DriftSide { forward, backward };

inline BinnedEstimate binned_drift(const Ensemble& e, int slice, const Bins& bins,
                                   DriftSide side, int min_count) {
    const int other = slice + (side == DriftSide::forward ? 1 : -1);
    if (slice < 0 || slice >= static_cast<int>(e.positions.size()) || other < 0 ||
        other >= static_cast<int>(e.positions.size()))
        throw std::invalid_argument("drift estimate: adjacent recorded slice missing");
    if (e.recorded_steps[std::max(slice, other)] -
            e.recorded_steps[std::min(slice, other)] != 1)
        throw std::invalid_argument("drift estimate: adjacent slices are not one step apart");
    const auto& here = e.positions[slice];
    const auto& there = e.positions[other];
    const long N = static_cast<long>(here.size());
    std::vector<double> sum(bins.n, 0.0), sum2(bins.n, 0.0);
    std::vector<long> cnt(bins.n, 0);
    for (long pth = 0; pth < N; ++pth) {
        const int i = bins.index(here[pth]);
        if (i < 0) continue; // conditioning set is the bin; outside samples are ignored
        const double inc = (side == DriftSide::forward ? there[pth] - here[pth]
                                                       : here[pth] - there[pth]) / e.dt;
        sum[i] += inc;
        sum2[i] += inc * inc;
        ++cnt[i];
    }
    BinnedEstimate out;
    out.bin_width = bins.width();
    out.total = N;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int i = 0; i < bins.n; ++i) {
        out.centers.push_back(bins.center(i));
        out.count.push_back(cnt[i]);
        if (cnt[i] < min_count) {
            out.value.push_back(nan);
            out.std_err.push_back(nan);
            continue;
        }
        const double mean = sum[i] / cnt[i];
        const double var = std::max(0.0, sum2[i] / cnt[i] - mean * mean);
        out.value.push_back(mean);
        out.std_err.push_back(std::sqrt(var / cnt[i]));
    }
    return out;
}

} // namespace detail

// Conditional-mean estimators of the forward and backward drifts:
//   b(x)  ~ E[(x_{k+1} - x_k)/dt | x_k in bin],
//   b*(x) ~ E[(x_k - x_{k-1})/dt | x_k in bin].
inline BinnedEstimate estimate_forward_drift(const Ensemble& e, int slice,
                                             const Bins& bins, int min_count = 30) {
    return detail::binned_drift(e, slice, bins, detail::DriftSide::forward, min_count);
}

inline BinnedEstimate estimate_backward_drift(const Ensemble& e, int slice,
                                              const Bins& bins, int min_count = 30) {
    return detail::binned_drift(e, slice, bins, detail::DriftSide::backward, min_count);
}

// L1 distance between two binned densities, as total probability mass.
inline double l1_distance(const BinnedEstimate& a, const BinnedEstimate& b) {
    if (a.centers.size() != b.centers.size())
        throw std::invalid_argument("l1_distance: bin count mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.value.size(); ++i)
        s += std::abs(a.value[i] - b.value[i]) * a.bin_width;
    return s;
}

// L1 distance between a histogram and an exact density, using the
// bin-averaged exact probability (Simpson rule per bin).
inline double l1_to_density(const BinnedEstimate& hist,
                            const std::function<double(double)>& rho) {
    double s = 0.0;
    const double w = hist.bin_width;
    for (std::size_t i = 0; i < hist.centers.size(); ++i) {
        const double c = hist.centers[i];
        const double pexact = w * (rho(c - w / 2) + 4.0 * rho(c) + rho(c + w / 2)) / 6.0;
        s += std::abs(hist.value[i] * w - pexact);
    }
    return s;
}

// Lag-1 autocorrelation across paths between two consecutive recorded
// slices; for a stationary linear drift -theta x this approaches
// exp(-theta dt).
inline double lag1_autocorrelation(const Ensemble& e, int slice) {
    if (slice + 1 >= static_cast<int>(e.positions.size()))
        throw std::invalid_argument("lag1_autocorrelation: need slice and slice+1");
    const auto& a = e.positions[slice];
    const auto& b = e.positions[slice + 1];
    const long N = static_cast<long>(a.size());
    double ma = 0.0, mb = 0.0;
    for (long i = 0; i < N; ++i) { ma += a[i]; mb += b[i]; }
    ma /= N; mb /= N;
    double cab = 0.0, va = 0.0, vb = 0.0;
    for (long i = 0; i < N; ++i) {
        cab += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    return cab / std::sqrt(va * vb);
}

inline double sample_mean(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

inline double sample_variance(const std::vector<double>& xs) {
    const double m = sample_mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
}

} // namespace stochmech
