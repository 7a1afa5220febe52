#pragma once

// Central finite-difference check of the analytic pair gradient.

#include <algorithm>
#include <cmath>
#include <vector>

#include "hypercf/random.hpp"
#include "hypercf/training.hpp"

namespace gradcheck {

struct Result {
    double max_violation = 0.0;  // max |a - n| / max(1e-6, 1e-4 * max(|a|, |n|)); passes when <= 1
    double max_relative = 0.0;   // max |a - n| / max(|a|, |n|) over coordinates above the floor
    std::size_t coordinates = 0;
};

inline constexpr double kStep = 1e-6;
inline constexpr double kRelTol = 1e-4;
inline constexpr double kAbsFloor = 1e-6;

inline void record(Result& r, double analytic, double numeric) {
    const double diff = std::fabs(analytic - numeric);
    const double scale = std::max(std::fabs(analytic), std::fabs(numeric));
    r.max_violation = std::max(r.max_violation, diff / std::max(kAbsFloor, kRelTol * scale));
    if (scale > kAbsFloor) r.max_relative = std::max(r.max_relative, diff / scale);
    ++r.coordinates;
}

inline double pair_loss(const hypercf::Model& model, const hypercf::Example& pair, double l2) {
    const hypercf::Example batch[1] = {pair};
    return hypercf::total_loss(batch, model, l2);
}

inline double central_difference(hypercf::Model& model, double& param, const hypercf::Example& pair, double l2) {
    const double saved = param;
    param = saved + kStep;
    const double up = pair_loss(model, pair, l2);
    param = saved - kStep;
    const double down = pair_loss(model, pair, l2);
    param = saved;
    return (up - down) / (2.0 * kStep);
}

/// Compares every coordinate the pair touches: the user and item rows of
/// all parts and, for QCF+, every head weight.
inline Result check_pair(hypercf::Model& model, const hypercf::Example& pair, double l2) {
    const auto analytic = hypercf::gradients(pair, model, l2);
    Result result;
    const std::size_t d = model.dim();
    for (std::size_t p = 0; p < model.table.user_parts.size(); ++p) {
        for (std::size_t s = 0; s < d; ++s) {
            record(result, analytic.user_rows[p][s],
                   central_difference(model, model.table.user_parts[p](pair.user, s), pair, l2));
            record(result, analytic.item_rows[p][s],
                   central_difference(model, model.table.item_parts[p](pair.item, s), pair, l2));
        }
    }
    if (model.head) {
        std::vector<hypercf::Matrix*> head;
        for (auto& w : model.head->hidden.weights) head.push_back(&w);
        for (auto& w : model.head->output.weights) head.push_back(&w);
        for (std::size_t k = 0; k < head.size(); ++k) {
            auto values = head[k]->values();
            const auto grad = analytic.head[k].values();
            for (std::size_t j = 0; j < values.size(); ++j) {
                record(result, grad[j], central_difference(model, values[j], pair, l2));
            }
        }
    }
    return result;
}

/// A random model of `kind` with entries in [-scale, scale].
inline hypercf::Model random_model(hypercf::ModelKind kind, std::size_t users, std::size_t items, std::size_t dim,
                                   hypercf::Rng& rng, double scale) {
    auto model = hypercf::init_model(kind, users, items, dim, rng.next_u64());
    for (auto* m : model.parameters())
        for (auto& v : m->values()) v = rng.uniform(-scale, scale);
    return model;
}

}  // namespace gradcheck
