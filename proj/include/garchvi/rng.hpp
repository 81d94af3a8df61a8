#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace garchvi {

/// Deterministic random source. All draws are built from the raw mt19937_64
/// stream with our own transforms, so a given seed yields the same sequence
/// on every platform and standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on (0,1), never exactly 0 or 1.
    double uniform();

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi);

    /// Standard normal via Box-Muller (no cached spare, so the draw count
    /// per call is fixed).
    double normal();

    /// Gamma(shape, 1) via Marsaglia-Tsang; shape > 0.
    double gamma(double shape);

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

/// Stable 64-bit seed derived from a master seed and a string tag (FNV-1a).
/// Used to give every batch cell an independent, reproducible stream.
std::uint64_t derive_seed(std::uint64_t master, const std::string& tag);

}  // namespace garchvi
