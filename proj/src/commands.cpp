#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "hypercf/checkpoint.hpp"
#include "hypercf/cli.hpp"
#include "hypercf/error.hpp"

namespace hypercf::cli {

namespace {

std::string join(const std::vector<std::size_t>& values) {
    std::string out;
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (k > 0) out += ',';
        out += std::to_string(values[k]);
    }
    return out;
}

std::string resolved_name(const RunConfig& cfg) {
    if (!cfg.dataset_name.empty()) return cfg.dataset_name;
    return cfg.data.stem().string();
}

void require_path(const std::filesystem::path& path, std::string_view flag) {
    if (path.empty()) {
        throw ConfigError(std::string(flag) + " is required");
    }
}

std::ofstream open_output(const std::filesystem::path& path, std::string_view what) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + std::string(what) + " '" + path.string() + "'");
    }
    return out;
}

TrainConfig stage_train_config(const RunConfig& cfg) {
    TrainConfig tc = cfg.train;
    tc.seed = sampling_seed(cfg.seed);
    return tc;
}

void print_epoch(std::ostream& out, std::string_view model, const EpochRecord& r) {
    out << model << " epoch " << r.epoch << ": loss " << std::fixed << std::setprecision(6) << r.mean_loss << " ("
        << std::setprecision(2) << r.elapsed_seconds << " s)";
    if (r.val_hr10) out << " hr@10 " << std::setprecision(4) << *r.val_hr10;
    out << std::defaultfloat << std::endl;
}

// Trains a fresh model of `kind` and width `dim` on the prepared split.
Model fit(const RunConfig& cfg, ModelKind kind, std::size_t dim, const Split& split, std::ostream& out,
          TrainResult* result) {
    Model model = init_model(kind, split.num_users, split.num_items, dim, init_seed(cfg.seed));
    TrainOptions options;
    options.validate_hr10 = cfg.validate_hr10;
    const std::string name(to_string(kind));
    options.on_epoch = [&](const EpochRecord& r) { print_epoch(out, name, r); };
    options.log = [&](const std::string& message) { out << message << '\n'; };
    auto trained = train(model, split, stage_train_config(cfg), options);
    if (result != nullptr) *result = std::move(trained);
    return model;
}

double mean_logged_epoch_seconds(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read run log '" + path.string() + "'");
    }
    double total = 0.0;
    std::size_t epochs = 0;
    std::string line;
    while (std::getline(in, line)) {
        const auto record = nlohmann::json::parse(line, nullptr, false);
        if (record.is_object() && record.contains("elapsed_seconds")) {
            total += record["elapsed_seconds"].get<double>();
            ++epochs;
        }
    }
    return epochs > 0 ? total / static_cast<double>(epochs) : 0.0;
}

}  // namespace

std::uint64_t split_seed(std::uint64_t master) { return derive_seed(master, "prepare"); }
std::uint64_t init_seed(std::uint64_t master) { return derive_seed(master, "init"); }
std::uint64_t sampling_seed(std::uint64_t master) { return derive_seed(master, "train"); }

std::string RunConfig::describe(std::string_view command) const {
    std::ostringstream s;
    s << std::setprecision(10);
    s << "command=" << command << " dataset=" << resolved_name(*this) << " format=" << format;
    if (delimiter) s << " delimiter=" << std::quoted(*delimiter);
    s << " header=" << header << " min_interactions=" << min_interactions << " model=" << to_string(model)
      << " dim=" << dim << " lr=" << train.learning_rate << " l2=" << train.l2_lambda
      << " neg_ratio=" << train.neg_ratio << " epochs=" << train.epochs << " batch_size=" << train.batch_size
      << " optimizer=" << to_string(train.optimizer) << " seed=" << seed << " k_list=" << join(k_list);
    return s.str();
}

FormatOptions RunConfig::format_options() const {
    FormatOptions f = FormatOptions::preset(format);
    if (delimiter) f.delimiter = *delimiter;
    if (header) f.header = true;
    return f;
}

void RunConfig::validate() const {
    if (dim == 0) throw ConfigError("--dim must be at least 1");
    if (k_list.empty()) throw ConfigError("--k-list must not be empty");
    for (const auto k : k_list) {
        if (k == 0) throw ConfigError("--k-list entries must be at least 1");
    }
    for (const auto d : dims) {
        if (d == 0) throw ConfigError("--dims entries must be at least 1");
    }
    if (!(train.learning_rate > 0.0)) throw ConfigError("--lr must be positive");
    if (min_interactions == 0) throw ConfigError("--min-interactions must be at least 1");
    train.validate();
}

PrepareSummary cmd_prepare(const RunConfig& cfg, std::ostream& out) {
    require_path(cfg.data, "--data");
    require_path(cfg.split_file, "--split-file");
    LoadReport load;
    const auto interactions = load_interactions(cfg.data, cfg.format_options(), &load);
    const Dataset dataset = build_dataset(interactions, cfg.min_interactions);

    PreparedSplit prepared;
    prepared.dataset_name = resolved_name(cfg);
    prepared.seed = cfg.seed;
    prepared.config = cfg.describe("prepare");
    prepared.actions = dataset.actions();
    prepared.split = leave_one_out(dataset, split_seed(cfg.seed));
    sample_eval_negatives(dataset, prepared.split, split_seed(cfg.seed));
    save_split(cfg.split_file, prepared);

    PrepareSummary summary{dataset.users(), dataset.items(), dataset.actions(), dataset.density(), load.malformed};
    out << "dataset " << prepared.dataset_name << ": users " << summary.users << ", items " << summary.items
        << ", actions " << summary.actions << ", density " << std::fixed << std::setprecision(3)
        << 100.0 * summary.density << "%" << std::defaultfloat;
    if (load.malformed > 0) out << " (" << load.malformed << " malformed rows skipped)";
    out << "\nsplit written to " << cfg.split_file.string() << '\n';
    return summary;
}

TrainResult cmd_train(const RunConfig& cfg, std::ostream& out) {
    cfg.validate();
    require_path(cfg.split_file, "--split-file");
    require_path(cfg.checkpoint, "--checkpoint");
    const PreparedSplit prepared = load_split(cfg.split_file);
    const Split& split = prepared.split;

    std::optional<std::ofstream> log;
    if (!cfg.run_log.empty()) {
        log = open_output(cfg.run_log, "run log");
        *log << nlohmann::json{{"config", cfg.describe("train")}}.dump() << '\n';
    }

    Model model = init_model(cfg.model, split.num_users, split.num_items, cfg.dim, init_seed(cfg.seed));
    TrainOptions options;
    options.validate_hr10 = cfg.validate_hr10;
    const std::string name(to_string(cfg.model));
    options.on_epoch = [&](const EpochRecord& r) {
        print_epoch(out, name, r);
        if (log) {
            nlohmann::json record{{"epoch", r.epoch}, {"mean_loss", r.mean_loss}, {"elapsed_seconds", r.elapsed_seconds}};
            if (r.val_hr10) record["val_hr10"] = *r.val_hr10;
            *log << record.dump() << '\n' << std::flush;
        }
    };
    options.log = [&](const std::string& message) {
        out << message << '\n';
        if (log) *log << nlohmann::json{{"message", message}}.dump() << '\n';
    };
    TrainResult result = train(model, split, stage_train_config(cfg), options);

    save_checkpoint(cfg.checkpoint, Checkpoint{std::move(model), cfg.seed, cfg.describe("train")});
    out << "checkpoint written to " << cfg.checkpoint.string() << '\n';
    return result;
}

EvalReport cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
    cfg.validate();
    require_path(cfg.split_file, "--split-file");
    require_path(cfg.checkpoint, "--checkpoint");
    const Checkpoint checkpoint = load_checkpoint(cfg.checkpoint);
    const PreparedSplit prepared = load_split(cfg.split_file);
    const Model& model = checkpoint.model;
    if (model.kind != cfg.model) {
        throw MismatchError("checkpoint holds a " + std::string(to_string(model.kind)) + " model but --model is " +
                            std::string(to_string(cfg.model)));
    }
    if (model.dim() != cfg.dim) {
        throw MismatchError("checkpoint has d=" + std::to_string(model.dim()) + " but --dim is " +
                            std::to_string(cfg.dim));
    }
    if (model.table.users() != prepared.split.num_users || model.table.items() != prepared.split.num_items) {
        throw MismatchError("checkpoint was trained on a different split (user or item count differs)");
    }

    EvalReport report = evaluate(model, prepared.split, cfg.k_list);
    if (cfg.timing && !cfg.run_log.empty()) {
        report.train_epoch_seconds = mean_logged_epoch_seconds(cfg.run_log);
    }
    const std::vector<ReportRow> rows{{std::string(to_string(model.kind)), prepared.dataset_name, report}};
    write_report_table(out, rows);
    if (!cfg.report.empty()) {
        auto csv = open_output(cfg.report, "report");
        csv << "# " << cfg.describe("evaluate") << '\n';
        write_report_csv(csv, rows, cfg.timing);
    }
    return report;
}

std::vector<ReportRow> cmd_sweep(const RunConfig& cfg, std::ostream& out) {
    cfg.validate();
    require_path(cfg.split_file, "--split-file");
    if (cfg.dims.empty()) throw ConfigError("--dims is required for sweep");
    const PreparedSplit prepared = load_split(cfg.split_file);

    std::vector<ReportRow> rows;
    for (const auto d : cfg.dims) {
        TrainResult trained;
        const Model model = fit(cfg, cfg.model, d, prepared.split, out, &trained);
        ReportRow row{std::string(to_string(cfg.model)) + "/d=" + std::to_string(d), prepared.dataset_name,
                      evaluate(model, prepared.split, cfg.k_list)};
        row.report.train_epoch_seconds = trained.mean_epoch_seconds;
        rows.push_back(std::move(row));
    }
    write_report_table(out, rows);
    if (!cfg.report.empty()) {
        auto csv = open_output(cfg.report, "report");
        csv << "# " << cfg.describe("sweep") << " dims=" << join(cfg.dims) << '\n';
        csv << "model,dataset,dim,k,hr,ndcg,users,train_epoch_seconds,test_seconds\n";
        for (std::size_t r = 0; r < rows.size(); ++r) {
            for (const auto& m : rows[r].report.metrics) {
                csv << to_string(cfg.model) << ',' << rows[r].dataset << ',' << cfg.dims[r] << ',' << m.k << ','
                    << std::fixed << std::setprecision(6) << m.hr << ',' << m.ndcg << ',' << rows[r].report.users
                    << ',';
                if (cfg.timing) {
                    csv << rows[r].report.train_epoch_seconds << ',' << rows[r].report.test_seconds;
                } else {
                    csv << ',';
                }
                csv << std::defaultfloat << '\n';
            }
        }
    }
    return rows;
}

std::vector<BenchRow> cmd_bench(const RunConfig& cfg, std::ostream& out) {
    cfg.validate();
    require_path(cfg.split_file, "--split-file");
    if (cfg.train.epochs == 0) throw ConfigError("bench needs --epochs >= 1");
    const std::vector<ModelKind> models =
        cfg.models.empty()
            ? std::vector<ModelKind>{ModelKind::GMF, ModelKind::MMF, ModelKind::CCF, ModelKind::QCF, ModelKind::QCFPlus}
            : cfg.models;
    const PreparedSplit prepared = load_split(cfg.split_file);

    std::vector<BenchRow> rows;
    for (const auto kind : models) {
        TrainResult trained;
        const Model model = fit(cfg, kind, cfg.dim, prepared.split, out, &trained);
        const EvalReport report = evaluate(model, prepared.split, cfg.k_list);
        rows.push_back({kind, trained.mean_epoch_seconds, report.test_seconds});
    }

    out << std::left << std::setw(10) << "model" << std::right << std::setw(14) << "epoch (s)" << std::setw(12)
        << "test (s)" << std::setw(14) << "runtime (s)" << '\n';
    for (const auto& r : rows) {
        out << std::left << std::setw(10) << to_string(r.model) << std::right << std::fixed << std::setprecision(3)
            << std::setw(14) << r.train_epoch_seconds << std::setw(12) << r.test_seconds << std::setw(14)
            << r.train_epoch_seconds + r.test_seconds << std::defaultfloat << '\n';
    }
    if (!cfg.report.empty()) {
        auto csv = open_output(cfg.report, "report");
        csv << "# " << cfg.describe("bench") << '\n';
        csv << "model,dataset,dim,epochs,train_epoch_seconds,test_seconds,runtime_seconds\n";
        for (const auto& r : rows) {
            csv << to_string(r.model) << ',' << prepared.dataset_name << ',' << cfg.dim << ',' << cfg.train.epochs
                << ',' << std::fixed << std::setprecision(6) << r.train_epoch_seconds << ',' << r.test_seconds << ','
                << r.train_epoch_seconds + r.test_seconds << std::defaultfloat << '\n';
        }
    }
    return rows;
}

int exit_code_for(std::string_view category) {
    if (category == "config") return 2;
    if (category == "io") return 3;
    if (category == "data") return 4;
    if (category == "format") return 5;
    if (category == "mismatch") return 6;
    if (category == "shape") return 7;
    return 1;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Complex and quaternion collaborative filtering: prepare, train, evaluate, sweep, bench"};
    app.set_config("--config", "", "TOML file with option values; command-line flags take precedence");
    app.require_subcommand(1);

    RunConfig cfg;
    std::string model_name = "qcf";
    std::string optimizer_name = "adam";
    std::vector<std::string> model_names;

    app.add_option("--data", cfg.data, "Raw interaction log");
    app.add_option("--format", cfg.format, "Input preset: tsv, tsv-nots, csv, ml-1m")->capture_default_str();
    app.add_option("--delimiter", cfg.delimiter, "Override the preset's field delimiter");
    app.add_flag("--header", cfg.header, "Input has a header line");
    app.add_option("--name", cfg.dataset_name, "Dataset name used in reports (default: file stem)");
    app.add_option("--min-interactions", cfg.min_interactions, "Minimum interactions per user")->capture_default_str();
    app.add_option("--model", model_name, "gmf, mmf, ccf, qcf or qcf-plus")->capture_default_str();
    app.add_option("--models", model_names, "Model list for bench")->delimiter(',');
    app.add_option("--dim", cfg.dim, "Latent dimension d")->capture_default_str();
    app.add_option("--dims", cfg.dims, "Dimension list for sweep")->delimiter(',');
    app.add_option("--lr", cfg.train.learning_rate, "Learning rate")->capture_default_str();
    app.add_option("--l2", cfg.train.l2_lambda, "L2 regularization weight")->capture_default_str();
    app.add_option("--neg-ratio", cfg.train.neg_ratio, "Negatives per positive")->capture_default_str();
    app.add_option("--epochs", cfg.train.epochs, "Training epochs")->capture_default_str();
    app.add_option("--batch-size", cfg.train.batch_size, "Mini-batch size")->capture_default_str();
    app.add_option("--optimizer", optimizer_name, "sgd or adam")->capture_default_str();
    app.add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
    app.add_option("--split-file", cfg.split_file, "Prepared split (written by prepare)");
    app.add_option("--checkpoint", cfg.checkpoint, "Model checkpoint");
    app.add_option("--report", cfg.report, "CSV report path");
    app.add_option("--log", cfg.run_log, "Run log (JSON lines)");
    app.add_option("--k-list", cfg.k_list, "Cutoffs for HR/NDCG")->delimiter(',');
    app.add_flag("--timing", cfg.timing, "Include wall-clock columns in evaluate/sweep reports");
    app.add_flag("--validate", cfg.validate_hr10, "Log held-out HR@10 after every epoch");

    auto* prepare = app.add_subcommand("prepare", "Ingest, filter, split and sample evaluation negatives");
    auto* train_cmd = app.add_subcommand("train", "Train a model and write a checkpoint");
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a checkpoint on the leave-one-out split");
    auto* sweep = app.add_subcommand("sweep", "Train and evaluate once per latent dimension");
    auto* bench = app.add_subcommand("bench", "Time training epochs and evaluation per model");
    for (auto* sub : {prepare, train_cmd, evaluate_cmd, sweep, bench}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: config: " << e.what() << '\n';
        return exit_code_for("config");
    }

    try {
        cfg.model = parse_model_kind(model_name);
        cfg.train.optimizer = parse_optimizer(optimizer_name);
        for (const auto& m : model_names) cfg.models.push_back(parse_model_kind(m));

        if (prepare->parsed()) cmd_prepare(cfg, out);
        else if (train_cmd->parsed()) cmd_train(cfg, out);
        else if (evaluate_cmd->parsed()) cmd_evaluate(cfg, out);
        else if (sweep->parsed()) cmd_sweep(cfg, out);
        else if (bench->parsed()) cmd_bench(cfg, out);
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.category() << ": " << e.what() << '\n';
        return exit_code_for(e.category());
    } catch (const std::exception& e) {
        err << "error: internal: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace hypercf::cli
