#include "hypercf/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "binary_io.hpp"

namespace hypercf {

namespace {

std::uint64_t kind_code(ModelKind kind) { return static_cast<std::uint64_t>(kind); }

ModelKind kind_from_code(std::uint64_t code) {
    if (code > static_cast<std::uint64_t>(ModelKind::QCFPlus)) {
        throw FormatError("checkpoint: unknown model kind code " + std::to_string(code));
    }
    return static_cast<ModelKind>(code);
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint) {
    const Model& model = checkpoint.model;
    model.validate();
    out.write(kCheckpointMagic.data(), static_cast<std::streamsize>(kCheckpointMagic.size()));
    binary::write_u64(out, kind_code(model.kind));
    binary::write_u64(out, model.dim());
    binary::write_u64(out, model.table.users());
    binary::write_u64(out, model.table.items());
    binary::write_u64(out, checkpoint.seed);
    binary::write_string(out, checkpoint.config);
    for (const Matrix* m : model.parameters()) {
        binary::write_matrix(out, *m);
    }
}

Checkpoint read_checkpoint(std::istream& in) {
    binary::Reader reader(in, "checkpoint");
    reader.expect_magic(kCheckpointMagic);
    Checkpoint checkpoint;
    const ModelKind kind = kind_from_code(reader.u64());
    const auto dim = reader.u64();
    const auto users = reader.u64();
    const auto items = reader.u64();
    checkpoint.seed = reader.u64();
    checkpoint.config = reader.string();

    Model& model = checkpoint.model;
    model.kind = kind;
    model.table.kind = kind == ModelKind::QCFPlus ? ModelKind::QCF : kind;
    model.table.dim = dim;
    const std::size_t parts = part_count(kind);
    for (std::size_t p = 0; p < parts; ++p) model.table.user_parts.push_back(reader.matrix());
    for (std::size_t p = 0; p < parts; ++p) model.table.item_parts.push_back(reader.matrix());
    if (kind == ModelKind::QCFPlus) {
        QuaternionHead head;
        for (auto& w : head.hidden.weights) w = reader.matrix();
        for (auto& w : head.output.weights) w = reader.matrix();
        model.head = std::move(head);
    }
    reader.expect_end();
    try {
        model.validate();
    } catch (const ShapeError& e) {
        throw FormatError(std::string("checkpoint: ") + e.what());
    }
    if (model.table.users() != users || model.table.items() != items) {
        throw FormatError("checkpoint: header counts disagree with the stored matrices");
    }
    return checkpoint;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write checkpoint '" + path.string() + "'");
    }
    write_checkpoint(out, checkpoint);
    if (!out.flush()) {
        throw IoError("failed writing checkpoint '" + path.string() + "'");
    }
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read checkpoint '" + path.string() + "'");
    }
    return read_checkpoint(in);
}

}  // namespace hypercf
