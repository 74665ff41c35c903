#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace stochmech {

// Density fell below the decomposition floor: the polar pair (R, S) is
// undefined at or near a node.
struct NodeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A solver violated one of its conservation guarantees (mass or norm).
struct SchemeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A sample path became non-finite (drift blow-up).
struct SimulationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Master seed used by the CLI and the acceptance suite when none is given.
constexpr std::uint64_t kDefaultSeed = 123456789ull;

// Relative density floor below which polar decomposition refuses to work.
constexpr double kDensityFloor = 1e-14;

// Quadrature tolerance for the unit-normalization invariant of densities.
constexpr double kNormTolerance = 1e-6;

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Derives an independent substream seed from a master seed.  Used for
// per-path streams and per-task streams so that results do not depend on
// scheduling or worker count.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t s = master + 0x9E3779B97F4A7C15ull * (stream + 1);
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    return a ^ (b >> 1);
}

} // namespace stochmech
