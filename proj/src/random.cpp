#include "hypercf/random.hpp"

#include <cmath>
#include <numbers>

namespace hypercf {

namespace {
__extension__ using u128 = unsigned __int128;
}  // namespace

std::uint64_t Rng::uniform_index(std::uint64_t n) {
    // Lemire, "Fast Random Integer Generation in an Interval" (2019).
    std::uint64_t x = next_u64();
    u128 m = static_cast<u128>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            x = next_u64();
            m = static_cast<u128>(x) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

double Rng::normal() {
    // 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag, std::uint64_t index) {
    std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
    for (const char ch : tag) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001B3ULL;
    }
    return splitmix64(parent ^ h ^ splitmix64(index + 1));
}

}  // namespace hypercf
