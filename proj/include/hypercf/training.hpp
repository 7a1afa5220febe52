#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hypercf/data.hpp"
#include "hypercf/model.hpp"
#include "hypercf/random.hpp"

namespace hypercf {

enum class OptimizerKind { SGD, Adam };

std::string_view to_string(OptimizerKind kind);
OptimizerKind parse_optimizer(std::string_view name);

struct TrainConfig {
    double learning_rate = 0.001;
    double l2_lambda = 0.001;
    std::size_t batch_size = 256;
    std::size_t epochs = 30;
    std::size_t neg_ratio = 4;
    OptimizerKind optimizer = OptimizerKind::Adam;
    std::uint64_t seed = 0;

    /// Throws ConfigError on lr <= 0, l2 < 0, batch_size or neg_ratio of 0.
    void validate() const;
};

struct Example {
    std::uint32_t user = 0;
    std::uint32_t item = 0;
    double label = 0.0;

    friend bool operator==(const Example&, const Example&) = default;
};

/// Component-wise binary cross-entropy, sum over components, stable form.
double component_loss(const ScoreComponents& components, double label);

/// Sum over the batch of component_loss plus l2_lambda times the squared
/// norm of every embedding row the pair touches (counted once per pair) and,
/// for QCF+, of the head weights (also once per pair). Throws DataError on
/// an empty batch.
double total_loss(std::span<const Example> batch, const Model& model, double l2_lambda);

/// Gradient of one pair's share of total_loss.
struct PairGradient {
    std::vector<std::vector<double>> user_rows;  // one per part, length d
    std::vector<std::vector<double>> item_rows;
    std::vector<Matrix> head;                    // QCF+ only, parameters() order
};

PairGradient gradients(const Example& pair, const Model& model, double l2_lambda);

/// Dense gradient mirroring Model::parameters().
class ModelGradient {
public:
    ModelGradient() = default;
    explicit ModelGradient(const Model& model);

    std::vector<Matrix>& blocks() { return blocks_; }
    const std::vector<Matrix>& blocks() const { return blocks_; }

    void set_zero();

    /// Adds the pair's gradient (data term and its L2 share) into the buffer.
    /// Returns that pair's loss.
    double accumulate(const Example& pair, const Model& model, double l2_lambda);

private:
    std::vector<Matrix> blocks_;
    std::vector<Quaternion> scratch_;
};

/// Adam / SGD state. Moment matrices mirror Model::parameters().
struct OptimizerState {
    OptimizerKind kind = OptimizerKind::Adam;
    std::vector<Matrix> first_moment;
    std::vector<Matrix> second_moment;
    std::uint64_t step = 0;

    static constexpr double kBeta1 = 0.9;
    static constexpr double kBeta2 = 0.999;
    static constexpr double kEpsilon = 1e-8;

    static OptimizerState create(OptimizerKind kind, const Model& model);
};

/// SGD: theta -= lr * g. Adam: bias-corrected moments, dense update of every
/// parameter. Throws ShapeError if gradient or state shapes differ from the
/// model's.
void optimizer_step(OptimizerState& state, Model& model, const ModelGradient& grad, double learning_rate);

struct SamplingStats {
    std::size_t users_without_negatives = 0;
};

/// One epoch of examples: the user's positives in a seeded shuffle, each
/// followed by neg_ratio negatives drawn uniformly from items the user has
/// no training interaction with. The stream is derive_seed(cfg.seed,
/// "sampling", epoch), so the result is a pure function of its arguments.
std::vector<Example> sample_training_batch(const Split& split, const TrainConfig& cfg, std::size_t epoch,
                                           SamplingStats* stats = nullptr);

struct EpochRecord {
    std::size_t epoch = 0;  // 1-based
    double mean_loss = 0.0;
    double elapsed_seconds = 0.0;
    std::optional<double> val_hr10;
};

struct TrainOptions {
    bool validate_hr10 = false;
    std::function<void(const EpochRecord&)> on_epoch;
    std::function<void(const std::string&)> log;
};

struct TrainResult {
    std::vector<EpochRecord> trace;
    double mean_epoch_seconds = 0.0;
};

/// Runs cfg.epochs epochs of mini-batch training on `model` in place.
TrainResult train(Model& model, const Split& split, const TrainConfig& cfg, const TrainOptions& options = {});

}  // namespace hypercf
