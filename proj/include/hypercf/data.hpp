#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hypercf {

inline constexpr std::size_t kEvalNegatives = 200;
inline constexpr std::size_t kMinUserInteractions = 5;

struct Interaction {
    std::string user;
    std::string item;
    double rating = 1.0;
    std::optional<std::int64_t> timestamp;
};

/// Column layout of a raw interaction log. Column indices are 0-based;
/// rating_column and timestamp_column may be absent.
struct FormatOptions {
    std::string delimiter = "\t";
    bool header = false;
    std::size_t user_column = 0;
    std::size_t item_column = 1;
    std::optional<std::size_t> rating_column = 2;
    std::optional<std::size_t> timestamp_column = 3;
    /// Fraction of malformed rows above which loading aborts.
    double max_malformed_fraction = 0.01;

    /// Named presets: "tsv" (user item rating timestamp, tab separated),
    /// "tsv-nots" (no timestamp), "csv" (comma, header line), "ml-1m"
    /// ("::" separated). Throws ConfigError on an unknown name.
    static FormatOptions preset(std::string_view name);
};

struct LoadReport {
    std::size_t rows = 0;
    std::size_t malformed = 0;
    std::vector<std::size_t> malformed_lines;  // first few, 1-based
};

/// Parses a delimited interaction log. Blank lines are ignored. A row is
/// malformed when a required column is missing or empty, or a numeric
/// column does not parse. Throws IoError if the file cannot be read and
/// DataError when more than max_malformed_fraction of rows are malformed.
std::vector<Interaction> load_interactions(const std::filesystem::path& path, const FormatOptions& format,
                                           LoadReport* report = nullptr);
std::vector<Interaction> parse_interactions(std::string_view text, const FormatOptions& format,
                                            LoadReport* report = nullptr, std::string_view source = "<memory>");

struct UserInteraction {
    std::uint32_t item = 0;
    std::optional<std::int64_t> timestamp;

    friend bool operator==(const UserInteraction&, const UserInteraction&) = default;
};

struct Dataset {
    std::vector<std::string> user_ids;  // dense index -> raw id
    std::vector<std::string> item_ids;
    std::vector<std::vector<UserInteraction>> interactions;  // per user, ascending item
    bool has_timestamps = false;

    std::size_t users() const { return user_ids.size(); }
    std::size_t items() const { return item_ids.size(); }
    std::size_t actions() const;
    double density() const;

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Binarizes and filters a raw log. Duplicate (user, item) rows collapse to
/// one keeping the latest timestamp. Users with fewer than
/// `min_user_interactions` distinct items and items left with no interactions
/// are removed repeatedly until nothing changes. Dense ids follow first-seen
/// order among the surviving rows. Throws DataError if nothing survives.
Dataset build_dataset(const std::vector<Interaction>& interactions,
                      std::size_t min_user_interactions = kMinUserInteractions);

struct Split {
    std::size_t num_users = 0;
    std::size_t num_items = 0;
    std::vector<std::vector<std::uint32_t>> train;  // per user, ascending
    std::vector<std::uint32_t> test_item;
    std::vector<std::vector<std::uint32_t>> eval_negatives;  // per user, sampling order

    bool user_has_train_item(std::size_t u, std::uint32_t item) const;
    std::size_t train_size() const;

    friend bool operator==(const Split&, const Split&) = default;
};

/// Holds out one interaction per user: the latest one when timestamps
/// exist (ties go to the larger item index), otherwise a uniformly random
/// one from derive_seed(seed, "split"). eval_negatives is left empty.
Split leave_one_out(const Dataset& dataset, std::uint64_t seed);

/// Draws kEvalNegatives distinct items per user from the items the user
/// never interacted with (train or test), stream derive_seed(seed,
/// "eval-negatives"). Throws DataError naming the first user with fewer than
/// kEvalNegatives eligible items.
void sample_eval_negatives(const Dataset& dataset, Split& split, std::uint64_t seed);

inline constexpr std::string_view kSplitMagic = "HYPERCF-SPLIT1";

/// Cached output of `prepare`.
struct PreparedSplit {
    std::string dataset_name;
    std::uint64_t seed = 0;
    std::string config;
    std::size_t actions = 0;
    Split split;

    friend bool operator==(const PreparedSplit&, const PreparedSplit&) = default;
};

// Layout (little-endian u64 integers, u32 item ids):
//   "HYPERCF-SPLIT1" | seed | actions | name | config | users | items
//   | per user: train count, train items, test item, negative count, negatives
// Strings are a u64 length followed by raw bytes.
void save_split(const std::filesystem::path& path, const PreparedSplit& prepared);
PreparedSplit load_split(const std::filesystem::path& path);

}  // namespace hypercf
