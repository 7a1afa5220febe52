#include "hypercf/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "hypercf/error.hpp"

namespace hypercf {

std::size_t rank_from_scores(std::span<const double> scores, std::span<const std::uint32_t> items) {
    if (scores.empty() || scores.size() != items.size()) {
        throw DataError("candidate scores and items must be nonempty and of equal length");
    }
    const double target = scores[0];
    const std::uint32_t target_item = items[0];
    std::size_t rank = 1;
    for (std::size_t k = 1; k < scores.size(); ++k) {
        if (scores[k] > target || (scores[k] == target && items[k] < target_item)) ++rank;
    }
    return rank;
}

std::size_t rank_candidates(const Model& model, std::size_t user, std::uint32_t test_item,
                            std::span<const std::uint32_t> negatives) {
    if (negatives.size() != kEvalNegatives) {
        throw DataError("candidate list for user " + std::to_string(user) + " has " +
                        std::to_string(negatives.size() + 1) + " items, expected " +
                        std::to_string(kEvalNegatives + 1));
    }
    std::vector<std::uint32_t> items;
    items.reserve(negatives.size() + 1);
    items.push_back(test_item);
    items.insert(items.end(), negatives.begin(), negatives.end());

    std::vector<std::uint32_t> sorted(items);
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw DataError("candidate list for user " + std::to_string(user) + " contains duplicate items");
    }

    std::vector<double> scores(items.size());
    for (std::size_t k = 0; k < items.size(); ++k) {
        scores[k] = score(model, user, items[k]);
    }
    return rank_from_scores(scores, items);
}

namespace {

void check_metric_args(std::span<const std::size_t> ranks, std::size_t k) {
    if (k < 1) throw ConfigError("cutoff k must be at least 1");
    if (ranks.empty()) throw DataError("no ranks to score");
}

}  // namespace

double hr_at_k(std::span<const std::size_t> ranks, std::size_t k) {
    check_metric_args(ranks, k);
    std::size_t hits = 0;
    for (const auto r : ranks) hits += r <= k ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

double ndcg_at_k(std::span<const std::size_t> ranks, std::size_t k) {
    check_metric_args(ranks, k);
    double gain = 0.0;
    for (const auto r : ranks) {
        if (r <= k) gain += 1.0 / std::log2(static_cast<double>(r) + 1.0);
    }
    return gain / static_cast<double>(ranks.size());
}

EvalReport evaluate(const Model& model, const Split& split, std::span<const std::size_t> cutoffs) {
    if (split.eval_negatives.size() != split.num_users) {
        throw DataError("split has no evaluation negatives; run prepare first");
    }
    const auto start = std::chrono::steady_clock::now();
    EvalReport report;
    report.users = split.num_users;
    report.ranks.resize(split.num_users);
    for (std::size_t u = 0; u < split.num_users; ++u) {
        report.ranks[u] = rank_candidates(model, u, split.test_item[u], split.eval_negatives[u]);
    }
    for (const auto k : cutoffs) {
        report.metrics.push_back({k, hr_at_k(report.ranks, k), ndcg_at_k(report.ranks, k)});
    }
    report.test_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

void write_report_csv(std::ostream& out, std::span<const ReportRow> rows, bool with_timing) {
    out << kReportCsvHeader << '\n';
    for (const auto& row : rows) {
        for (const auto& m : row.report.metrics) {
            out << row.model << ',' << row.dataset << ',' << m.k << ',' << std::fixed << std::setprecision(6) << m.hr
                << ',' << m.ndcg << ',' << row.report.users << ',';
            if (with_timing) {
                out << row.report.train_epoch_seconds << ',' << row.report.test_seconds;
            } else {
                out << ',';
            }
            out << '\n';
        }
    }
    out << std::defaultfloat;
}

void write_report_table(std::ostream& out, std::span<const ReportRow> rows) {
    out << std::left << std::setw(10) << "model" << std::setw(16) << "dataset" << std::right << std::setw(5) << "k"
        << std::setw(10) << "HR" << std::setw(10) << "NDCG" << std::setw(8) << "users" << '\n';
    for (const auto& row : rows) {
        for (const auto& m : row.report.metrics) {
            out << std::left << std::setw(10) << row.model << std::setw(16) << row.dataset << std::right
                << std::setw(5) << m.k << std::fixed << std::setprecision(4) << std::setw(10) << m.hr << std::setw(10)
                << m.ndcg << std::setw(8) << row.report.users << '\n';
        }
    }
    out << std::defaultfloat;
}

}  // namespace hypercf
