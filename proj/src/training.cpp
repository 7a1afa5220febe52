#include "hypercf/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "hypercf/error.hpp"
#include "hypercf/eval.hpp"

namespace hypercf {

std::string_view to_string(OptimizerKind kind) { return kind == OptimizerKind::SGD ? "sgd" : "adam"; }

OptimizerKind parse_optimizer(std::string_view name) {
    if (name == "sgd") return OptimizerKind::SGD;
    if (name == "adam") return OptimizerKind::Adam;
    throw ConfigError("unknown optimizer '" + std::string(name) + "' (expected sgd or adam)");
}

void TrainConfig::validate() const {
    // A zero learning rate is a legal frozen run; the CLI insists on > 0.
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw ConfigError("learning rate must be a finite non-negative number");
    }
    if (!(l2_lambda >= 0.0) || !std::isfinite(l2_lambda)) {
        throw ConfigError("l2 lambda must be a finite non-negative number");
    }
    if (batch_size == 0) throw ConfigError("batch size must be at least 1");
    if (neg_ratio == 0) throw ConfigError("negative ratio must be at least 1");
}

double component_loss(const ScoreComponents& components, double label) {
    double loss = 0.0;
    for (const double c : components.view()) {
        // -[y log s(c) + (1-y) log(1 - s(c))] with log s(c) = -softplus(-c)
        loss += label * softplus(-c) + (1.0 - label) * softplus(c);
    }
    return loss;
}

namespace {

double head_squared_norm(const Model& model) {
    if (!model.head) return 0.0;
    double sum = 0.0;
    for (const auto& w : model.head->hidden.weights) sum += squared_norm(w.values());
    for (const auto& w : model.head->output.weights) sum += squared_norm(w.values());
    return sum;
}

double rows_squared_norm(const Model& model, std::size_t u, std::size_t i) {
    double sum = 0.0;
    for (const auto& m : model.table.user_parts) sum += squared_norm(m.row(u));
    for (const auto& m : model.table.item_parts) sum += squared_norm(m.row(i));
    return sum;
}

// Destination for one pair's gradient. user(p) / item(p) are the rows the
// embedding gradients are added to; head(k) is the k-th head matrix
// (hidden a..d, then output a..d).
struct RowSink {
    std::vector<std::span<double>> user;
    std::vector<std::span<double>> item;
    std::vector<Matrix*> head;
};

// Adds the pair's gradient into `sink` and returns the pair's loss.
double backprop_pair(const Model& model, const Example& pair, double l2, RowSink& sink,
                     std::vector<Quaternion>& scratch) {
    const EmbeddingTable& table = model.table;
    const std::size_t u = pair.user;
    const std::size_t i = pair.item;
    const std::size_t d = table.dim;
    const double y = pair.label;
    const ScoreComponents comps = forward(model, u, i);
    double loss = component_loss(comps, y);

    std::array<double, 4> g{};
    for (std::size_t c = 0; c < comps.count; ++c) g[c] = sigmoid(comps[c]) - y;

    switch (model.kind) {
        case ModelKind::GMF:
            axpy(g[0], table.item_parts[0].row(i), sink.user[0]);
            axpy(g[0], table.user_parts[0].row(u), sink.item[0]);
            break;
        case ModelKind::MMF:
            for (std::size_t p = 0; p < 4; ++p) {
                axpy(g[0], table.item_parts[p].row(i), sink.user[p]);
                axpy(g[0], table.user_parts[p].row(u), sink.item[p]);
            }
            break;
        case ModelKind::CCF: {
            // dx = g * conj(y), dy = conj(x) * g
            const Complex gc{g[0], g[1]};
            for (std::size_t s = 0; s < d; ++s) {
                const Complex x{table.user_parts[0](u, s), table.user_parts[1](u, s)};
                const Complex it{table.item_parts[0](i, s), table.item_parts[1](i, s)};
                const Complex dx = complex_mul(gc, conj(it));
                const Complex dy = complex_mul(conj(x), gc);
                sink.user[0][s] += dx.re;
                sink.user[1][s] += dx.im;
                sink.item[0][s] += dy.re;
                sink.item[1][s] += dy.im;
            }
            break;
        }
        case ModelKind::QCF: {
            // For r = p ⊗ q: dL/dp = g ⊗ conj(q), dL/dq = conj(p) ⊗ g.
            const Quaternion gq{g[0], g[1], g[2], g[3]};
            for (std::size_t s = 0; s < d; ++s) {
                const Quaternion dp = hamilton_product(gq, conj(table.item_quaternion(i, s)));
                const Quaternion dq = hamilton_product(conj(table.user_quaternion(u, s)), gq);
                sink.user[0][s] += dp.a;
                sink.user[1][s] += dp.b;
                sink.user[2][s] += dp.c;
                sink.user[3][s] += dp.d;
                sink.item[0][s] += dq.a;
                sink.item[1][s] += dq.b;
                sink.item[2][s] += dq.c;
                sink.item[3][s] += dq.d;
            }
            break;
        }
        case ModelKind::QCFPlus: {
            const QuaternionHead& head = *model.head;
            const auto h = qcf_elementwise(table, u, i);
            const auto z = head.hidden.forward(h);
            const Quaternion go{g[0], g[1], g[2], g[3]};

            // Output unit o = sum_r w[r] ⊗ z[r]; hidden pre-activation
            // gradient goes through the sigmoid derivative z (1 - z).
            auto& gpre = scratch;
            gpre.assign(d, Quaternion{});
            for (std::size_t r = 0; r < d; ++r) {
                const Quaternion w = head.output.weight(0, r);
                const Quaternion dw = hamilton_product(go, conj(z[r]));
                sink.head[4]->operator()(0, r) += dw.a;
                sink.head[5]->operator()(0, r) += dw.b;
                sink.head[6]->operator()(0, r) += dw.c;
                sink.head[7]->operator()(0, r) += dw.d;
                const Quaternion dz = hamilton_product(conj(w), go);
                const Quaternion zr = z[r];
                gpre[r] = {dz.a * zr.a * (1.0 - zr.a), dz.b * zr.b * (1.0 - zr.b), dz.c * zr.c * (1.0 - zr.c),
                           dz.d * zr.d * (1.0 - zr.d)};
            }
            std::vector<Quaternion> dh(d);
            for (std::size_t r = 0; r < d; ++r) {
                for (std::size_t s = 0; s < d; ++s) {
                    const Quaternion dW = hamilton_product(gpre[r], conj(h[s]));
                    sink.head[0]->operator()(r, s) += dW.a;
                    sink.head[1]->operator()(r, s) += dW.b;
                    sink.head[2]->operator()(r, s) += dW.c;
                    sink.head[3]->operator()(r, s) += dW.d;
                    dh[s] = dh[s] + hamilton_product(conj(head.hidden.weight(r, s)), gpre[r]);
                }
            }
            for (std::size_t s = 0; s < d; ++s) {
                const Quaternion dp = hamilton_product(dh[s], conj(table.item_quaternion(i, s)));
                const Quaternion dq = hamilton_product(conj(table.user_quaternion(u, s)), dh[s]);
                sink.user[0][s] += dp.a;
                sink.user[1][s] += dp.b;
                sink.user[2][s] += dp.c;
                sink.user[3][s] += dp.d;
                sink.item[0][s] += dq.a;
                sink.item[1][s] += dq.b;
                sink.item[2][s] += dq.c;
                sink.item[3][s] += dq.d;
            }
            break;
        }
    }

    if (l2 > 0.0) {
        for (std::size_t p = 0; p < table.user_parts.size(); ++p) {
            axpy(2.0 * l2, table.user_parts[p].row(u), sink.user[p]);
            axpy(2.0 * l2, table.item_parts[p].row(i), sink.item[p]);
        }
        if (model.head) {
            std::size_t k = 0;
            for (const auto& w : model.head->hidden.weights) axpy(2.0 * l2, w.values(), sink.head[k++]->values());
            for (const auto& w : model.head->output.weights) axpy(2.0 * l2, w.values(), sink.head[k++]->values());
        }
        loss += l2 * (rows_squared_norm(model, u, i) + head_squared_norm(model));
    }
    return loss;
}

}  // namespace

double total_loss(std::span<const Example> batch, const Model& model, double l2_lambda) {
    if (batch.empty()) {
        throw DataError("total_loss needs a nonempty batch");
    }
    const double head_norm = head_squared_norm(model);
    double loss = 0.0;
    for (const Example& e : batch) {
        loss += component_loss(forward(model, e.user, e.item), e.label);
        if (l2_lambda > 0.0) {
            loss += l2_lambda * (rows_squared_norm(model, e.user, e.item) + head_norm);
        }
    }
    return loss;
}

PairGradient gradients(const Example& pair, const Model& model, double l2_lambda) {
    const std::size_t parts = model.table.user_parts.size();
    const std::size_t d = model.dim();
    PairGradient out;
    out.user_rows.assign(parts, std::vector<double>(d, 0.0));
    out.item_rows.assign(parts, std::vector<double>(d, 0.0));
    RowSink sink;
    for (auto& r : out.user_rows) sink.user.emplace_back(r);
    for (auto& r : out.item_rows) sink.item.emplace_back(r);
    if (model.head) {
        for (const auto& w : model.head->hidden.weights) out.head.emplace_back(w.rows(), w.cols());
        for (const auto& w : model.head->output.weights) out.head.emplace_back(w.rows(), w.cols());
        for (auto& m : out.head) sink.head.push_back(&m);
    }
    std::vector<Quaternion> scratch;
    backprop_pair(model, pair, l2_lambda, sink, scratch);
    return out;
}

ModelGradient::ModelGradient(const Model& model) {
    for (const Matrix* m : model.parameters()) blocks_.emplace_back(m->rows(), m->cols());
}

void ModelGradient::set_zero() {
    for (auto& b : blocks_) b.set_zero();
}

double ModelGradient::accumulate(const Example& pair, const Model& model, double l2_lambda) {
    const std::size_t parts = model.table.user_parts.size();
    const std::size_t expected = 2 * parts + (model.head ? 8 : 0);
    if (blocks_.size() != expected) {
        throw ShapeError("gradient buffer does not match the model");
    }
    RowSink sink;
    for (std::size_t p = 0; p < parts; ++p) {
        sink.user.push_back(blocks_[p].row(pair.user));
        sink.item.push_back(blocks_[parts + p].row(pair.item));
    }
    for (std::size_t k = 2 * parts; k < blocks_.size(); ++k) sink.head.push_back(&blocks_[k]);
    return backprop_pair(model, pair, l2_lambda, sink, scratch_);
}

OptimizerState OptimizerState::create(OptimizerKind kind, const Model& model) {
    OptimizerState state;
    state.kind = kind;
    if (kind == OptimizerKind::Adam) {
        for (const Matrix* m : model.parameters()) {
            state.first_moment.emplace_back(m->rows(), m->cols());
            state.second_moment.emplace_back(m->rows(), m->cols());
        }
    }
    return state;
}

void optimizer_step(OptimizerState& state, Model& model, const ModelGradient& grad, double learning_rate) {
    auto params = model.parameters();
    const auto& blocks = grad.blocks();
    if (blocks.size() != params.size()) {
        throw ShapeError("gradient has " + std::to_string(blocks.size()) + " blocks, model has " +
                         std::to_string(params.size()));
    }
    for (std::size_t k = 0; k < params.size(); ++k) {
        if (!params[k]->same_shape(blocks[k])) {
            throw ShapeError("gradient block " + std::to_string(k) + " has the wrong shape");
        }
    }
    ++state.step;

    if (state.kind == OptimizerKind::SGD) {
        for (std::size_t k = 0; k < params.size(); ++k) {
            axpy(-learning_rate, blocks[k].values(), params[k]->values());
        }
        return;
    }

    if (state.first_moment.size() != params.size() || state.second_moment.size() != params.size()) {
        throw ShapeError("optimizer state does not match the model");
    }
    constexpr double b1 = OptimizerState::kBeta1;
    constexpr double b2 = OptimizerState::kBeta2;
    const double t = static_cast<double>(state.step);
    const double correction1 = 1.0 - std::pow(b1, t);
    const double correction2 = 1.0 - std::pow(b2, t);
    for (std::size_t k = 0; k < params.size(); ++k) {
        auto theta = params[k]->values();
        const auto g = blocks[k].values();
        auto m = state.first_moment[k].values();
        auto v = state.second_moment[k].values();
        if (m.size() != theta.size() || v.size() != theta.size()) {
            throw ShapeError("optimizer moment " + std::to_string(k) + " has the wrong shape");
        }
        for (std::size_t j = 0; j < theta.size(); ++j) {
            m[j] = b1 * m[j] + (1.0 - b1) * g[j];
            v[j] = b2 * v[j] + (1.0 - b2) * g[j] * g[j];
            const double m_hat = m[j] / correction1;
            const double v_hat = v[j] / correction2;
            theta[j] -= learning_rate * m_hat / (std::sqrt(v_hat) + OptimizerState::kEpsilon);
        }
    }
}

std::vector<Example> sample_training_batch(const Split& split, const TrainConfig& cfg, std::size_t epoch,
                                           SamplingStats* stats) {
    if (split.train_size() == 0) {
        throw DataError("training set is empty");
    }
    Rng rng(derive_seed(cfg.seed, "sampling", epoch));

    std::vector<Example> positives;
    positives.reserve(split.train_size());
    for (std::size_t u = 0; u < split.train.size(); ++u) {
        for (const auto item : split.train[u]) {
            positives.push_back({static_cast<std::uint32_t>(u), item, 1.0});
        }
    }
    rng.shuffle(std::span<Example>(positives));

    std::vector<Example> out;
    out.reserve(positives.size() * (1 + cfg.neg_ratio));
    std::vector<bool> starved(split.train.size(), false);
    for (const Example& pos : positives) {
        out.push_back(pos);
        if (split.train[pos.user].size() >= split.num_items) {
            starved[pos.user] = true;
            continue;
        }
        for (std::size_t n = 0; n < cfg.neg_ratio; ++n) {
            std::uint32_t j = 0;
            do {
                j = static_cast<std::uint32_t>(rng.uniform_index(split.num_items));
            } while (split.user_has_train_item(pos.user, j));
            out.push_back({pos.user, j, 0.0});
        }
    }
    if (stats != nullptr) {
        stats->users_without_negatives = static_cast<std::size_t>(std::count(starved.begin(), starved.end(), true));
    }
    return out;
}

TrainResult train(Model& model, const Split& split, const TrainConfig& cfg, const TrainOptions& options) {
    cfg.validate();
    model.validate();
    if (model.table.users() != split.num_users || model.table.items() != split.num_items) {
        throw ShapeError("model is sized for " + std::to_string(model.table.users()) + "x" +
                         std::to_string(model.table.items()) + " but the split is " + std::to_string(split.num_users) +
                         "x" + std::to_string(split.num_items));
    }
    using clock = std::chrono::steady_clock;

    TrainResult result;
    ModelGradient grad(model);
    OptimizerState state = OptimizerState::create(cfg.optimizer, model);
    double total_seconds = 0.0;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto start = clock::now();
        SamplingStats stats;
        const auto examples = sample_training_batch(split, cfg, epoch, &stats);
        if (stats.users_without_negatives > 0 && options.log) {
            options.log("epoch " + std::to_string(epoch + 1) + ": " + std::to_string(stats.users_without_negatives) +
                        " user(s) have no unobserved items; negatives skipped");
        }

        double loss_sum = 0.0;
        for (std::size_t begin = 0; begin < examples.size(); begin += cfg.batch_size) {
            const std::size_t end = std::min(examples.size(), begin + cfg.batch_size);
            grad.set_zero();
            for (std::size_t k = begin; k < end; ++k) {
                loss_sum += grad.accumulate(examples[k], model, cfg.l2_lambda);
            }
            optimizer_step(state, model, grad, cfg.learning_rate);
        }

        EpochRecord record;
        record.epoch = epoch + 1;
        record.mean_loss = loss_sum / static_cast<double>(examples.size());
        record.elapsed_seconds = std::chrono::duration<double>(clock::now() - start).count();
        total_seconds += record.elapsed_seconds;
        if (options.validate_hr10 && !split.eval_negatives.empty()) {
            const std::vector<std::size_t> cutoff{10};
            record.val_hr10 = evaluate(model, split, cutoff).metrics.front().hr;
        }
        if (options.on_epoch) options.on_epoch(record);
        result.trace.push_back(record);
    }
    if (cfg.epochs > 0) {
        result.mean_epoch_seconds = total_seconds / static_cast<double>(cfg.epochs);
    }
    return result;
}

}  // namespace hypercf
