#pragma once

// Deterministic synthetic interaction logs for end-to-end runs.

#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "hypercf/random.hpp"

namespace synthetic {

/// Writes "user item rating timestamp" rows. Each user interacts with
/// `per_user` distinct items; items cluster by user so there is some signal.
inline void write_log(const std::filesystem::path& path, std::size_t users, std::size_t items, std::size_t per_user,
                      std::uint64_t seed) {
    hypercf::Rng rng(seed);
    std::ofstream out(path, std::ios::trunc);
    std::int64_t clock = 1000;
    for (std::size_t u = 0; u < users; ++u) {
        const std::size_t home = (u % 4) * (items / 4);
        std::set<std::size_t> chosen;
        while (chosen.size() < per_user) {
            const bool local = rng.uniform01() < 0.7;
            chosen.insert(local ? home + rng.uniform_index(items / 4) : rng.uniform_index(items));
        }
        for (const auto i : chosen) {
            out << "user" << u << '\t' << "item" << i << '\t' << 1 + rng.uniform_index(5) << '\t'
                << clock + static_cast<std::int64_t>(rng.uniform_index(100000)) << '\n';
        }
    }
}

}  // namespace synthetic
