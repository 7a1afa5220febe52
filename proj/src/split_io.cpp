#include <fstream>

#include "binary_io.hpp"
#include "hypercf/data.hpp"

namespace hypercf {

namespace {

void write_ids(std::ostream& out, const std::vector<std::uint32_t>& ids) {
    binary::write_u64(out, ids.size());
    for (const auto id : ids) binary::write_u32(out, id);
}

std::vector<std::uint32_t> read_ids(binary::Reader& reader, std::uint64_t limit, std::uint32_t num_items) {
    const auto n = reader.bounded(limit, "id count");
    std::vector<std::uint32_t> ids(n);
    for (auto& id : ids) {
        id = reader.u32();
        if (id >= num_items) {
            throw FormatError("split file: item id " + std::to_string(id) + " out of range");
        }
    }
    return ids;
}

}  // namespace

void save_split(const std::filesystem::path& path, const PreparedSplit& prepared) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write split file '" + path.string() + "'");
    }
    const Split& split = prepared.split;
    out.write(kSplitMagic.data(), static_cast<std::streamsize>(kSplitMagic.size()));
    binary::write_u64(out, prepared.seed);
    binary::write_u64(out, prepared.actions);
    binary::write_string(out, prepared.dataset_name);
    binary::write_string(out, prepared.config);
    binary::write_u64(out, split.num_users);
    binary::write_u64(out, split.num_items);
    for (std::size_t u = 0; u < split.num_users; ++u) {
        write_ids(out, split.train[u]);
        binary::write_u32(out, split.test_item[u]);
        write_ids(out, u < split.eval_negatives.size() ? split.eval_negatives[u] : std::vector<std::uint32_t>{});
    }
    if (!out.flush()) {
        throw IoError("failed writing split file '" + path.string() + "'");
    }
}

PreparedSplit load_split(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read split file '" + path.string() + "'");
    }
    binary::Reader reader(in, "split file '" + path.string() + "'");
    reader.expect_magic(kSplitMagic);
    PreparedSplit prepared;
    prepared.seed = reader.u64();
    prepared.actions = reader.u64();
    prepared.dataset_name = reader.string();
    prepared.config = reader.string();
    Split& split = prepared.split;
    split.num_users = reader.bounded(1ULL << 31, "user count");
    split.num_items = reader.bounded(1ULL << 31, "item count");
    const auto num_items = static_cast<std::uint32_t>(split.num_items);
    split.train.resize(split.num_users);
    split.test_item.resize(split.num_users);
    split.eval_negatives.resize(split.num_users);
    bool any_negatives = false;
    for (std::size_t u = 0; u < split.num_users; ++u) {
        split.train[u] = read_ids(reader, split.num_items, num_items);
        split.test_item[u] = reader.u32();
        if (split.test_item[u] >= num_items) {
            throw FormatError("split file: test item out of range");
        }
        split.eval_negatives[u] = read_ids(reader, split.num_items, num_items);
        any_negatives = any_negatives || !split.eval_negatives[u].empty();
    }
    if (!any_negatives) split.eval_negatives.clear();
    reader.expect_end();
    return prepared;
}

}  // namespace hypercf
