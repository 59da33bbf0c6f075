#pragma once

#include <cstdint>

#include "uspread/point_set.hpp"

namespace uspread {

// SplitMix64 (Steele/Lea/Flood 2014). Fixed algorithm so generated fixtures
// are identical on every platform; std::uniform_* distributions are not.
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform on [0, 1)
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform on [-h, h]
    double uniform_sym(double h) { return (2.0 * uniform01() - 1.0) * h; }
};

enum class GeneratorKind {
    Lattice,
    PerturbedLattice,
    CutProject1D,
    CutProject2D,
    Poisson,
};

struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::Lattice;
    Box window;

    double alpha = 1.0;       // lattice spacing
    double eps = 0.0;         // perturbation half-width (l_inf), must be < alpha/2
    double intensity = 1.0;   // Poisson points per unit volume

    // Cut-and-project: accept (n, m) in Z^2 when offset <= n + m*internal_slope
    // < offset + 1, and emit the physical projection n + m*slope. The defaults
    // give the golden-ratio (Fibonacci) chain. CutProject2D takes the product
    // of two such chains, the second axis using offset + offset_shift.
    double slope = 0.6180339887498949;            // (sqrt(5)-1)/2
    double internal_slope = -1.6180339887498949;  // -(sqrt(5)+1)/2
    double offset = 0.0;
    double offset_shift = 0.31830988618367167;    // 1/pi, decorrelates the axes

    std::uint64_t seed = 0;
};

GeneratorKind parse_generator_kind(const std::string& name);

// Deterministic for a given spec (including seed).
PointSet generate(const GeneratorSpec& spec);

} // namespace uspread
