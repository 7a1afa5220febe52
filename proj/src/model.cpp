#include "hypercf/model.hpp"

#include <string>

#include "hypercf/error.hpp"
#include "hypercf/random.hpp"

namespace hypercf {

std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::GMF: return "gmf";
        case ModelKind::MMF: return "mmf";
        case ModelKind::CCF: return "ccf";
        case ModelKind::QCF: return "qcf";
        case ModelKind::QCFPlus: return "qcf-plus";
    }
    return "?";
}

ModelKind parse_model_kind(std::string_view name) {
    if (name == "gmf") return ModelKind::GMF;
    if (name == "mmf") return ModelKind::MMF;
    if (name == "ccf") return ModelKind::CCF;
    if (name == "qcf") return ModelKind::QCF;
    if (name == "qcf-plus" || name == "qcf+") return ModelKind::QCFPlus;
    throw ConfigError("unknown model kind '" + std::string(name) + "' (expected gmf, mmf, ccf, qcf, qcf-plus)");
}

std::size_t part_count(ModelKind kind) {
    switch (kind) {
        case ModelKind::GMF: return 1;
        case ModelKind::CCF: return 2;
        default: return 4;
    }
}

std::size_t component_count(ModelKind kind) {
    switch (kind) {
        case ModelKind::GMF:
        case ModelKind::MMF: return 1;
        case ModelKind::CCF: return 2;
        default: return 4;
    }
}

EmbeddingTable EmbeddingTable::zeros(ModelKind kind, std::size_t users, std::size_t items, std::size_t dim) {
    EmbeddingTable table;
    table.kind = kind == ModelKind::QCFPlus ? ModelKind::QCF : kind;
    table.dim = dim;
    for (std::size_t p = 0; p < part_count(kind); ++p) {
        table.user_parts.emplace_back(users, dim);
        table.item_parts.emplace_back(items, dim);
    }
    return table;
}

void EmbeddingTable::validate() const {
    if (kind == ModelKind::QCFPlus) {
        throw ShapeError("embedding tables use the QCF layout for qcf-plus");
    }
    const std::size_t parts = part_count(kind);
    if (user_parts.size() != parts || item_parts.size() != parts) {
        throw ShapeError("embedding table for " + std::string(to_string(kind)) + " needs " + std::to_string(parts) +
                         " parts per side");
    }
    if (dim == 0) {
        throw ShapeError("embedding dimension must be positive");
    }
    for (std::size_t p = 0; p < parts; ++p) {
        if (user_parts[p].cols() != dim || item_parts[p].cols() != dim ||
            user_parts[p].rows() != user_parts[0].rows() || item_parts[p].rows() != item_parts[0].rows()) {
            throw ShapeError("embedding part " + std::to_string(p) + " has an inconsistent shape");
        }
    }
}

Quaternion EmbeddingTable::user_quaternion(std::size_t u, std::size_t s) const {
    return {user_parts[0](u, s), user_parts[1](u, s), user_parts[2](u, s), user_parts[3](u, s)};
}

Quaternion EmbeddingTable::item_quaternion(std::size_t i, std::size_t s) const {
    return {item_parts[0](i, s), item_parts[1](i, s), item_parts[2](i, s), item_parts[3](i, s)};
}

QuaternionDenseLayer::QuaternionDenseLayer(std::size_t out_dim, std::size_t in_dim)
    : weights{Matrix(out_dim, in_dim), Matrix(out_dim, in_dim), Matrix(out_dim, in_dim), Matrix(out_dim, in_dim)} {}

std::vector<Quaternion> QuaternionDenseLayer::linear(std::span<const Quaternion> x) const {
    if (x.size() != in_dim()) {
        throw ShapeError("quaternion layer expects input width " + std::to_string(in_dim()) + ", got " +
                         std::to_string(x.size()));
    }
    std::vector<Quaternion> out(out_dim());
    for (std::size_t r = 0; r < out_dim(); ++r) {
        Quaternion acc;
        for (std::size_t s = 0; s < in_dim(); ++s) {
            acc = acc + hamilton_product(weight(r, s), x[s]);
        }
        out[r] = acc;
    }
    return out;
}

std::vector<Quaternion> QuaternionDenseLayer::forward(std::span<const Quaternion> x) const {
    auto out = linear(x);
    for (auto& q : out) {
        q = split_sigmoid(q);
    }
    return out;
}

std::vector<Matrix*> Model::parameters() {
    std::vector<Matrix*> out;
    for (auto& m : table.user_parts) out.push_back(&m);
    for (auto& m : table.item_parts) out.push_back(&m);
    if (head) {
        for (auto& m : head->hidden.weights) out.push_back(&m);
        for (auto& m : head->output.weights) out.push_back(&m);
    }
    return out;
}

std::vector<const Matrix*> Model::parameters() const {
    std::vector<const Matrix*> out;
    for (auto* m : const_cast<Model*>(this)->parameters()) out.push_back(m);
    return out;
}

void Model::validate() const {
    const ModelKind layout = kind == ModelKind::QCFPlus ? ModelKind::QCF : kind;
    if (table.kind != layout) {
        throw ShapeError("model kind and embedding table kind disagree");
    }
    table.validate();
    if ((kind == ModelKind::QCFPlus) != head.has_value()) {
        throw ShapeError("a quaternion head is required for qcf-plus and only for qcf-plus");
    }
    if (head) {
        const std::size_t d = table.dim;
        for (const auto& w : head->hidden.weights) {
            if (w.rows() != d || w.cols() != d) throw ShapeError("hidden quaternion layer must be d x d");
        }
        for (const auto& w : head->output.weights) {
            if (w.rows() != 1 || w.cols() != d) throw ShapeError("quaternion output unit must be 1 x d");
        }
    }
}

namespace {

Matrix normal_matrix(std::size_t rows, std::size_t cols, double stddev, Rng& rng) {
    Matrix m(rows, cols);
    for (auto& v : m.values()) {
        v = stddev * rng.normal();
    }
    return m;
}

constexpr double kRealInitStddev = 0.01;

void fill_side(ModelKind kind, std::vector<Matrix>& parts, std::size_t rows, std::size_t dim, std::uint64_t seed,
               std::string_view tag) {
    Rng rng(derive_seed(seed, tag));
    switch (kind) {
        case ModelKind::GMF:
        case ModelKind::MMF:
            for (auto& m : parts) m = normal_matrix(rows, dim, kRealInitStddev, rng);
            break;
        case ModelKind::CCF: {
            auto init = complex_init(rows, dim, rng);
            parts[0] = std::move(init[0]);
            parts[1] = std::move(init[1]);
            break;
        }
        case ModelKind::QCF:
        case ModelKind::QCFPlus: {
            auto init = quaternion_init(rows, dim, rng);
            for (std::size_t p = 0; p < 4; ++p) parts[p] = std::move(init[p]);
            break;
        }
    }
}

void check_ids(const EmbeddingTable& table, std::size_t u, std::size_t i) {
    if (u >= table.users()) {
        throw DataError("user id " + std::to_string(u) + " out of range (" + std::to_string(table.users()) + " users)");
    }
    if (i >= table.items()) {
        throw DataError("item id " + std::to_string(i) + " out of range (" + std::to_string(table.items()) + " items)");
    }
}

void check_kind(const EmbeddingTable& table, ModelKind expected) {
    if (table.kind != expected) {
        throw ShapeError(std::string(to_string(expected)) + " scoring on a " + std::string(to_string(table.kind)) +
                         " table");
    }
}

}  // namespace

Model init_model(ModelKind kind, std::size_t users, std::size_t items, std::size_t dim, std::uint64_t seed) {
    if (users == 0 || items == 0 || dim == 0) {
        throw ConfigError("model needs at least one user, one item and d >= 1");
    }
    Model model;
    model.kind = kind;
    model.table = EmbeddingTable::zeros(kind, users, items, dim);
    fill_side(kind, model.table.user_parts, users, dim, seed, "init-user");
    fill_side(kind, model.table.item_parts, items, dim, seed, "init-item");
    if (kind == ModelKind::QCFPlus) {
        QuaternionHead head;
        Rng hidden_rng(derive_seed(seed, "init-hidden"));
        head.hidden.weights = quaternion_init(dim, dim, hidden_rng);
        Rng output_rng(derive_seed(seed, "init-output"));
        head.output.weights = quaternion_init(1, dim, output_rng);
        model.head = std::move(head);
    }
    return model;
}

ScoreComponents gmf_forward(const EmbeddingTable& table, std::size_t u, std::size_t i) {
    check_kind(table, ModelKind::GMF);
    check_ids(table, u, i);
    return {{dot(table.user_parts[0].row(u), table.item_parts[0].row(i))}, 1};
}

ScoreComponents mmf_forward(const EmbeddingTable& table, std::size_t u, std::size_t i) {
    check_kind(table, ModelKind::MMF);
    check_ids(table, u, i);
    double a = 0.0;
    for (std::size_t p = 0; p < 4; ++p) {
        a += dot(table.user_parts[p].row(u), table.item_parts[p].row(i));
    }
    return {{a}, 1};
}

ScoreComponents ccf_forward(const EmbeddingTable& table, std::size_t u, std::size_t i) {
    check_kind(table, ModelKind::CCF);
    check_ids(table, u, i);
    const auto U = table.user_parts[0].row(u);
    const auto V = table.user_parts[1].row(u);
    const auto P = table.item_parts[0].row(i);
    const auto Q = table.item_parts[1].row(i);
    return {{dot(U, P) - dot(V, Q), dot(V, P) + dot(U, Q)}, 2};
}

ScoreComponents qcf_forward(const EmbeddingTable& table, std::size_t u, std::size_t i) {
    check_kind(table, ModelKind::QCF);
    check_ids(table, u, i);
    const auto U = table.user_parts[0].row(u);
    const auto V = table.user_parts[1].row(u);
    const auto X = table.user_parts[2].row(u);
    const auto Y = table.user_parts[3].row(u);
    const auto P = table.item_parts[0].row(i);
    const auto Q = table.item_parts[1].row(i);
    const auto S = table.item_parts[2].row(i);
    const auto T = table.item_parts[3].row(i);
    return {{
                dot(U, P) - dot(V, Q) - dot(X, S) - dot(Y, T),
                dot(U, Q) + dot(V, P) + dot(X, T) - dot(Y, S),
                dot(U, S) - dot(V, T) + dot(X, P) + dot(Y, Q),
                dot(U, T) + dot(V, S) - dot(X, Q) + dot(Y, P),
            },
            4};
}

std::vector<Quaternion> qcf_elementwise(const EmbeddingTable& table, std::size_t u, std::size_t i) {
    check_kind(table, ModelKind::QCF);
    check_ids(table, u, i);
    std::vector<Quaternion> out(table.dim);
    for (std::size_t s = 0; s < table.dim; ++s) {
        out[s] = hamilton_product(table.user_quaternion(u, s), table.item_quaternion(i, s));
    }
    return out;
}

Quaternion qcf_plus_forward(const EmbeddingTable& table, const QuaternionHead& head, std::size_t u, std::size_t i) {
    const auto hidden = head.hidden.forward(qcf_elementwise(table, u, i));
    return head.output.linear(hidden).front();
}

ScoreComponents forward(const Model& model, std::size_t u, std::size_t i) {
    switch (model.kind) {
        case ModelKind::GMF: return gmf_forward(model.table, u, i);
        case ModelKind::MMF: return mmf_forward(model.table, u, i);
        case ModelKind::CCF: return ccf_forward(model.table, u, i);
        case ModelKind::QCF: return qcf_forward(model.table, u, i);
        case ModelKind::QCFPlus: {
            const Quaternion q = qcf_plus_forward(model.table, *model.head, u, i);
            return {{q.a, q.b, q.c, q.d}, 4};
        }
    }
    throw ShapeError("unknown model kind");
}

double predict(ModelKind kind, const ScoreComponents& components) {
    const std::size_t expected = component_count(kind);
    if (components.count != expected) {
        throw ShapeError(std::string(to_string(kind)) + " expects " + std::to_string(expected) +
                         " score components, got " + std::to_string(components.count));
    }
    // Imaginary parts are summed first and the real part added last, so a
    // QCF score with zero imaginary parts is exactly (sigma(a) + 1.5) / 4.
    double imaginary = 0.0;
    for (std::size_t c = 1; c < expected; ++c) {
        imaginary += sigmoid(components[c]);
    }
    return (sigmoid(components[0]) + imaginary) / static_cast<double>(expected);
}

}  // namespace hypercf
