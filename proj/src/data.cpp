#include "hypercf/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "hypercf/error.hpp"
#include "hypercf/random.hpp"

namespace hypercf {

FormatOptions FormatOptions::preset(std::string_view name) {
    FormatOptions f;
    if (name == "tsv") return f;
    if (name == "tsv-nots") {
        f.timestamp_column.reset();
        return f;
    }
    if (name == "csv") {
        f.delimiter = ",";
        f.header = true;
        return f;
    }
    if (name == "ml-1m") {
        f.delimiter = "::";
        return f;
    }
    throw ConfigError("unknown input format '" + std::string(name) + "' (expected tsv, tsv-nots, csv, ml-1m)");
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line, std::string_view delimiter) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delimiter, start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + delimiter.size();
    }
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_real(std::string_view s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<std::int64_t> parse_timestamp(std::string_view s) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc{} && ptr == s.data() + s.size()) return v;
    // Some exports write integral seconds as "881250949.0".
    const auto real = parse_real(s);
    if (real && *real == std::floor(*real) && std::fabs(*real) < 9.0e15) return static_cast<std::int64_t>(*real);
    return std::nullopt;
}

std::optional<Interaction> parse_row(std::string_view line, const FormatOptions& format) {
    const auto fields = split_fields(line, format.delimiter);
    auto field = [&](std::size_t column) -> std::optional<std::string_view> {
        if (column >= fields.size()) return std::nullopt;
        return trim(fields[column]);
    };
    Interaction row;
    const auto user = field(format.user_column);
    const auto item = field(format.item_column);
    if (!user || !item || user->empty() || item->empty()) return std::nullopt;
    row.user = std::string(*user);
    row.item = std::string(*item);
    if (format.rating_column) {
        const auto text = field(*format.rating_column);
        if (!text) return std::nullopt;
        const auto rating = parse_real(*text);
        if (!rating) return std::nullopt;
        row.rating = *rating;
    }
    if (format.timestamp_column) {
        const auto text = field(*format.timestamp_column);
        if (!text || text->empty()) return std::nullopt;
        row.timestamp = parse_timestamp(*text);
        if (!row.timestamp) return std::nullopt;
    }
    return row;
}

}  // namespace

std::vector<Interaction> parse_interactions(std::string_view text, const FormatOptions& format, LoadReport* report,
                                            std::string_view source) {
    if (format.delimiter.empty()) {
        throw ConfigError("delimiter must not be empty");
    }
    LoadReport local;
    LoadReport& rep = report != nullptr ? *report : local;
    rep = LoadReport{};

    std::vector<Interaction> rows;
    std::size_t line_no = 0;
    bool header_pending = format.header;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (trim(line).empty()) continue;
        if (header_pending) {
            header_pending = false;
            continue;
        }
        ++rep.rows;
        if (auto row = parse_row(line, format)) {
            rows.push_back(std::move(*row));
        } else {
            ++rep.malformed;
            if (rep.malformed_lines.size() < 10) rep.malformed_lines.push_back(line_no);
        }
    }

    if (rep.rows > 0 &&
        static_cast<double>(rep.malformed) > format.max_malformed_fraction * static_cast<double>(rep.rows)) {
        std::ostringstream msg;
        msg << source << ": " << rep.malformed << " of " << rep.rows << " rows are malformed (first at line";
        for (const auto l : rep.malformed_lines) msg << ' ' << l;
        msg << ')';
        throw DataError(msg.str());
    }
    return rows;
}

std::vector<Interaction> load_interactions(const std::filesystem::path& path, const FormatOptions& format,
                                           LoadReport* report) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read interaction file '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw IoError("error while reading '" + path.string() + "'");
    }
    return parse_interactions(buffer.str(), format, report, path.string());
}

std::size_t Dataset::actions() const {
    std::size_t n = 0;
    for (const auto& list : interactions) n += list.size();
    return n;
}

double Dataset::density() const {
    if (users() == 0 || items() == 0) return 0.0;
    return static_cast<double>(actions()) / (static_cast<double>(users()) * static_cast<double>(items()));
}

Dataset build_dataset(const std::vector<Interaction>& interactions, std::size_t min_user_interactions) {
    if (interactions.empty()) {
        throw DataError("no interactions to build a dataset from");
    }
    const bool has_timestamps = std::all_of(interactions.begin(), interactions.end(),
                                            [](const Interaction& r) { return r.timestamp.has_value(); });

    // Provisional ids in first-seen order over the raw log.
    std::unordered_map<std::string, std::uint32_t> raw_user;
    std::unordered_map<std::string, std::uint32_t> raw_item;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> row_ids;
    row_ids.reserve(interactions.size());
    for (const auto& r : interactions) {
        const auto u = raw_user.try_emplace(r.user, static_cast<std::uint32_t>(raw_user.size())).first->second;
        const auto i = raw_item.try_emplace(r.item, static_cast<std::uint32_t>(raw_item.size())).first->second;
        row_ids.emplace_back(u, i);
    }

    // Collapse duplicates, keeping the latest timestamp.
    std::vector<std::unordered_map<std::uint32_t, std::int64_t>> per_user(raw_user.size());
    for (std::size_t k = 0; k < interactions.size(); ++k) {
        const auto [u, i] = row_ids[k];
        const std::int64_t ts = has_timestamps ? *interactions[k].timestamp : 0;
        auto [it, inserted] = per_user[u].try_emplace(i, ts);
        if (!inserted) it->second = std::max(it->second, ts);
    }

    // Filter to a fixpoint: drop thin users, then items nobody kept.
    std::vector<bool> user_alive(raw_user.size(), true);
    std::vector<bool> item_alive(raw_item.size(), true);
    while (true) {
        bool changed = false;
        std::vector<std::size_t> item_degree(raw_item.size(), 0);
        for (std::size_t u = 0; u < per_user.size(); ++u) {
            if (!user_alive[u]) continue;
            std::size_t degree = 0;
            for (const auto& [i, ts] : per_user[u]) degree += item_alive[i] ? 1 : 0;
            if (degree < min_user_interactions) {
                user_alive[u] = false;
                changed = true;
                continue;
            }
            for (const auto& [i, ts] : per_user[u]) {
                if (item_alive[i]) ++item_degree[i];
            }
        }
        for (std::size_t i = 0; i < item_alive.size(); ++i) {
            if (item_alive[i] && item_degree[i] == 0) {
                item_alive[i] = false;
                changed = true;
            }
        }
        if (!changed) break;
    }

    // Dense ids in first-seen order among the surviving rows.
    constexpr auto kUnset = static_cast<std::uint32_t>(-1);
    std::vector<std::uint32_t> user_dense(raw_user.size(), kUnset);
    std::vector<std::uint32_t> item_dense(raw_item.size(), kUnset);
    Dataset ds;
    ds.has_timestamps = has_timestamps;
    for (std::size_t k = 0; k < interactions.size(); ++k) {
        const auto [u, i] = row_ids[k];
        if (!user_alive[u] || !item_alive[i]) continue;
        if (user_dense[u] == kUnset) {
            user_dense[u] = static_cast<std::uint32_t>(ds.user_ids.size());
            ds.user_ids.push_back(interactions[k].user);
        }
        if (item_dense[i] == kUnset) {
            item_dense[i] = static_cast<std::uint32_t>(ds.item_ids.size());
            ds.item_ids.push_back(interactions[k].item);
        }
    }
    if (ds.user_ids.empty()) {
        throw DataError("dataset is empty after keeping users with at least " + std::to_string(min_user_interactions) +
                        " interactions");
    }

    ds.interactions.resize(ds.user_ids.size());
    for (std::size_t u = 0; u < per_user.size(); ++u) {
        if (!user_alive[u]) continue;
        auto& list = ds.interactions[user_dense[u]];
        for (const auto& [i, ts] : per_user[u]) {
            if (!item_alive[i]) continue;
            UserInteraction entry{item_dense[i], std::nullopt};
            if (has_timestamps) entry.timestamp = ts;
            list.push_back(entry);
        }
        std::sort(list.begin(), list.end(),
                  [](const UserInteraction& x, const UserInteraction& y) { return x.item < y.item; });
    }
    return ds;
}

bool Split::user_has_train_item(std::size_t u, std::uint32_t item) const {
    const auto& list = train[u];
    return std::binary_search(list.begin(), list.end(), item);
}

std::size_t Split::train_size() const {
    std::size_t n = 0;
    for (const auto& list : train) n += list.size();
    return n;
}

Split leave_one_out(const Dataset& dataset, std::uint64_t seed) {
    Split split;
    split.num_users = dataset.users();
    split.num_items = dataset.items();
    split.train.resize(split.num_users);
    split.test_item.resize(split.num_users);
    Rng rng(derive_seed(seed, "split"));

    for (std::size_t u = 0; u < split.num_users; ++u) {
        const auto& list = dataset.interactions[u];
        if (list.empty()) {
            throw DataError("user " + dataset.user_ids[u] + " has no interactions");
        }
        std::size_t held = 0;
        if (dataset.has_timestamps) {
            // list is ascending in item, so >= picks the larger index on ties
            for (std::size_t k = 1; k < list.size(); ++k) {
                if (*list[k].timestamp >= *list[held].timestamp) held = k;
            }
        } else {
            held = static_cast<std::size_t>(rng.uniform_index(list.size()));
        }
        split.test_item[u] = list[held].item;
        auto& train = split.train[u];
        train.reserve(list.size() - 1);
        for (std::size_t k = 0; k < list.size(); ++k) {
            if (k != held) train.push_back(list[k].item);
        }
    }
    return split;
}

void sample_eval_negatives(const Dataset& dataset, Split& split, std::uint64_t seed) {
    Rng rng(derive_seed(seed, "eval-negatives"));
    const std::size_t n_items = dataset.items();
    split.eval_negatives.assign(split.num_users, {});

    for (std::size_t u = 0; u < split.num_users; ++u) {
        const auto& list = dataset.interactions[u];
        if (n_items - list.size() < kEvalNegatives) {
            throw DataError("user " + dataset.user_ids[u] + " has only " + std::to_string(n_items - list.size()) +
                            " non-interacted items; " + std::to_string(kEvalNegatives) +
                            " evaluation negatives are required");
        }
        auto interacted = [&](std::uint32_t item) {
            return std::binary_search(list.begin(), list.end(), UserInteraction{item, std::nullopt},
                                      [](const UserInteraction& x, const UserInteraction& y) { return x.item < y.item; });
        };
        std::unordered_set<std::uint32_t> chosen;
        auto& negatives = split.eval_negatives[u];
        negatives.reserve(kEvalNegatives);
        while (negatives.size() < kEvalNegatives) {
            const auto j = static_cast<std::uint32_t>(rng.uniform_index(n_items));
            if (interacted(j) || !chosen.insert(j).second) continue;
            negatives.push_back(j);
        }
    }
}

}  // namespace hypercf
