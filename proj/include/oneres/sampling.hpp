#pragma once

#include <cstdint>
#include <random>

namespace oneres {

/// Radical-inverse (Halton) low-discrepancy sequence, deterministic by index.
inline double halton(std::uint64_t index, unsigned base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

/// Seeded uniform stream used wherever quasi-randomness is not required.
struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    double uniform(double lo, double hi) {
        std::uniform_real_distribution<double> d(lo, hi);
        return d(gen);
    }
    int uniform_int(int lo, int hi) {
        std::uniform_int_distribution<int> d(lo, hi);
        return d(gen);
    }
};

}  // namespace oneres
