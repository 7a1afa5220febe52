#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hypercf/hypercomplex.hpp"
#include "hypercf/matrix.hpp"

namespace hypercf {

enum class ModelKind { GMF, MMF, CCF, QCF, QCFPlus };

std::string_view to_string(ModelKind kind);
/// Accepts gmf, mmf, ccf, qcf, qcf-plus (also qcf+). Throws ConfigError.
ModelKind parse_model_kind(std::string_view name);

/// Number of embedding matrices per side: 1 (GMF), 2 (CCF), 4 (MMF, QCF).
std::size_t part_count(ModelKind kind);
/// Number of pre-activation score components: 1 (GMF, MMF), 2 (CCF), 4 (QCF).
std::size_t component_count(ModelKind kind);

/// Pre-activation interaction components (a) / (a, b) / (a, b, c, d).
struct ScoreComponents {
    std::array<double, 4> values{};
    std::size_t count = 0;

    std::span<const double> view() const { return {values.data(), count}; }
    double operator[](std::size_t i) const { return values[i]; }

    friend bool operator==(const ScoreComponents&, const ScoreComponents&) = default;
};

/// Per-entity hypercomplex embeddings. Part p of the user side holds the
/// p-th component (U, V, X, Y); the item side holds (P, Q, S, T).
struct EmbeddingTable {
    ModelKind kind = ModelKind::GMF;
    std::size_t dim = 0;
    std::vector<Matrix> user_parts;
    std::vector<Matrix> item_parts;

    /// Zero-filled table with the part layout of `kind`. QCFPlus uses the
    /// QCF layout.
    static EmbeddingTable zeros(ModelKind kind, std::size_t users, std::size_t items, std::size_t dim);

    std::size_t users() const { return user_parts.empty() ? 0 : user_parts.front().rows(); }
    std::size_t items() const { return item_parts.empty() ? 0 : item_parts.front().rows(); }

    /// Throws ShapeError when the part count or any matrix shape is off.
    void validate() const;

    Quaternion user_quaternion(std::size_t u, std::size_t s) const;
    Quaternion item_quaternion(std::size_t i, std::size_t s) const;

    friend bool operator==(const EmbeddingTable&, const EmbeddingTable&) = default;
};

/// Quaternion fully connected map: out[r] = sum_s W[r,s] ⊗ x[s].
/// forward() additionally applies split sigmoid.
struct QuaternionDenseLayer {
    QuaternionParts weights;  // each out_dim x in_dim

    QuaternionDenseLayer() = default;
    QuaternionDenseLayer(std::size_t out_dim, std::size_t in_dim);

    std::size_t out_dim() const { return weights[0].rows(); }
    std::size_t in_dim() const { return weights[0].cols(); }

    Quaternion weight(std::size_t r, std::size_t s) const { return gather(weights, r, s); }

    std::vector<Quaternion> linear(std::span<const Quaternion> x) const;
    std::vector<Quaternion> forward(std::span<const Quaternion> x) const;

    friend bool operator==(const QuaternionDenseLayer&, const QuaternionDenseLayer&) = default;
};

/// Quaternion head used by QCF+: one dense layer of width d with split
/// sigmoid over the per-dimension Hamilton products, then a linear
/// quaternion output unit (1 x d) producing (a, b, c, d).
struct QuaternionHead {
    QuaternionDenseLayer hidden;
    QuaternionDenseLayer output;

    friend bool operator==(const QuaternionHead&, const QuaternionHead&) = default;
};

struct Model {
    ModelKind kind = ModelKind::GMF;
    EmbeddingTable table;
    std::optional<QuaternionHead> head;  // present iff kind == QCFPlus

    std::size_t dim() const { return table.dim; }

    /// Every trainable matrix in a fixed order: user parts, item parts,
    /// then (QCF+) hidden weights a..d and output weights a..d.
    std::vector<Matrix*> parameters();
    std::vector<const Matrix*> parameters() const;

    void validate() const;

    friend bool operator==(const Model&, const Model&) = default;
};

/// Freshly initialized model. QCF/QCF+ embeddings and head weights use
/// quaternion_init, CCF uses complex_init, GMF/MMF draw N(0, 0.01^2).
/// Every matrix group has its own sub-stream derived from `seed`.
Model init_model(ModelKind kind, std::size_t users, std::size_t items, std::size_t dim, std::uint64_t seed);

ScoreComponents gmf_forward(const EmbeddingTable& table, std::size_t u, std::size_t i);
ScoreComponents mmf_forward(const EmbeddingTable& table, std::size_t u, std::size_t i);
ScoreComponents ccf_forward(const EmbeddingTable& table, std::size_t u, std::size_t i);
ScoreComponents qcf_forward(const EmbeddingTable& table, std::size_t u, std::size_t i);

/// Per-dimension Hamilton products H_u[s] ⊗ H_i[s], s < d (before summation).
std::vector<Quaternion> qcf_elementwise(const EmbeddingTable& table, std::size_t u, std::size_t i);

Quaternion qcf_plus_forward(const EmbeddingTable& table, const QuaternionHead& head, std::size_t u, std::size_t i);

/// Dispatches on model.kind. Throws ShapeError on out-of-range ids.
ScoreComponents forward(const Model& model, std::size_t u, std::size_t i);

/// Mean of the sigmoid of every component. Throws ShapeError when the
/// component count does not match `kind`.
double predict(ModelKind kind, const ScoreComponents& components);

inline double score(const Model& model, std::size_t u, std::size_t i) {
    return predict(model.kind, forward(model, u, i));
}

}  // namespace hypercf
