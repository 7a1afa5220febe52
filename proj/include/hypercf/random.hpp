#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace hypercf {

/// Seedable generator with platform-independent output.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The standard distributions are not, so every draw goes through
/// the helpers below, which are defined purely in terms of the raw 64-bit
/// outputs.
///
/// Stream splitting: a child stream for tag `t` (and optional index `n`) is
/// seeded with `derive_seed(parent_seed, t, n)`, i.e. SplitMix64 applied to
/// parent_seed XOR FNV-1a(t) XOR splitmix(n + 1). Each embedding table,
/// each epoch and each pipeline stage draws from its own child stream.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Unbiased uniform integer in [0, n) (Lemire's multiply-and-reject).
    /// n must be positive.
    std::uint64_t uniform_index(std::uint64_t n);

    /// Standard normal via Box-Muller (no caching of the second variate).
    double normal();

    template <typename T>
    void shuffle(std::span<T> values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(uniform_index(i));
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag, std::uint64_t index = 0);

}  // namespace hypercf
