#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hypercf/data.hpp"
#include "hypercf/model.hpp"

namespace hypercf {

inline const std::vector<std::size_t> kDefaultCutoffs{5, 10, 20};

/// 1-based rank of `test_item` among itself and `negatives` under model
/// scores, descending, ties broken by ascending item index. Throws
/// DataError unless there are exactly kEvalNegatives distinct negatives,
/// none equal to the test item.
std::size_t rank_candidates(const Model& model, std::size_t user, std::uint32_t test_item,
                            std::span<const std::uint32_t> negatives);

/// Same ranking rule on precomputed scores; index 0 is the test item.
std::size_t rank_from_scores(std::span<const double> scores, std::span<const std::uint32_t> items);

double hr_at_k(std::span<const std::size_t> ranks, std::size_t k);
double ndcg_at_k(std::span<const std::size_t> ranks, std::size_t k);

struct MetricAtK {
    std::size_t k = 0;
    double hr = 0.0;
    double ndcg = 0.0;
};

struct EvalReport {
    std::vector<MetricAtK> metrics;
    std::size_t users = 0;
    double train_epoch_seconds = 0.0;
    double test_seconds = 0.0;
    std::vector<std::size_t> ranks;  // per user
};

EvalReport evaluate(const Model& model, const Split& split,
                    std::span<const std::size_t> cutoffs = kDefaultCutoffs);

struct ReportRow {
    std::string model;
    std::string dataset;
    EvalReport report;
};

inline constexpr std::string_view kReportCsvHeader =
    "model,dataset,k,hr,ndcg,users,train_epoch_seconds,test_seconds";

/// One line per (row, k). When `with_timing` is false the two timing
/// fields are left empty so the file depends only on the inputs.
void write_report_csv(std::ostream& out, std::span<const ReportRow> rows, bool with_timing);
void write_report_table(std::ostream& out, std::span<const ReportRow> rows);

}  // namespace hypercf
