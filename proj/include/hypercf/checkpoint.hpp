#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "hypercf/model.hpp"

namespace hypercf {

inline constexpr std::string_view kCheckpointMagic = "HYPERCF1";

struct Checkpoint {
    Model model;
    std::uint64_t seed = 0;
    std::string config;  // effective run configuration, echoed for provenance

    friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

// Layout (all integers little-endian u64, reals as IEEE-754 binary64 bits):
//   "HYPERCF1" | kind | dim | users | items | seed | config length | config
//   | user parts | item parts | [hidden a..d | output a..d]
// Each matrix is rows | cols | rows*cols values.
void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace hypercf
