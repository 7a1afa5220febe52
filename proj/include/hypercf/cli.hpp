#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hypercf/data.hpp"
#include "hypercf/eval.hpp"
#include "hypercf/model.hpp"
#include "hypercf/training.hpp"

namespace hypercf::cli {

/// Everything a command needs. Flags fill it; a config file may fill it
/// first, with flags taking precedence.
struct RunConfig {
    std::filesystem::path data;
    std::string format = "tsv";
    std::optional<std::string> delimiter;
    bool header = false;
    std::size_t min_interactions = kMinUserInteractions;
    std::string dataset_name;

    ModelKind model = ModelKind::QCF;
    std::vector<ModelKind> models;     // bench
    std::size_t dim = 30;
    std::vector<std::size_t> dims;     // sweep
    TrainConfig train;
    std::uint64_t seed = 42;

    std::filesystem::path split_file;
    std::filesystem::path checkpoint;
    std::filesystem::path report;
    std::filesystem::path run_log;
    std::vector<std::size_t> k_list = kDefaultCutoffs;
    bool timing = false;
    bool validate_hr10 = false;

    /// Semantic settings echoed into output artifacts. Output paths are left
    /// out so that identical runs written to different places match.
    std::string describe(std::string_view command) const;

    FormatOptions format_options() const;

    /// Throws ConfigError for d = 0, an empty k list or any k = 0, and the
    /// TrainConfig rules (with learning rate strictly positive).
    void validate() const;
};

/// Seeds of the pipeline stages, derived from the master seed.
std::uint64_t split_seed(std::uint64_t master);
std::uint64_t init_seed(std::uint64_t master);
std::uint64_t sampling_seed(std::uint64_t master);

struct PrepareSummary {
    std::size_t users = 0;
    std::size_t items = 0;
    std::size_t actions = 0;
    double density = 0.0;
    std::size_t malformed_rows = 0;
};

PrepareSummary cmd_prepare(const RunConfig& cfg, std::ostream& out);
TrainResult cmd_train(const RunConfig& cfg, std::ostream& out);
EvalReport cmd_evaluate(const RunConfig& cfg, std::ostream& out);
std::vector<ReportRow> cmd_sweep(const RunConfig& cfg, std::ostream& out);

struct BenchRow {
    ModelKind model = ModelKind::GMF;
    double train_epoch_seconds = 0.0;
    double test_seconds = 0.0;
};

std::vector<BenchRow> cmd_bench(const RunConfig& cfg, std::ostream& out);

/// Parses argv and runs the selected command. Errors are reported as one
/// line "error: <category>: <message>" on `err`. Returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Exit code used for an error category.
int exit_code_for(std::string_view category);

}  // namespace hypercf::cli
