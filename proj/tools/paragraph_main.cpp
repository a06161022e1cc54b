// Command-line front end for the kernel-runtime modeling pipeline:
//   parse | graph | variants | dataset build | train | eval | ablate |
//   predict | pipeline
// Exit codes: 0 success, 1 usage, 2 input error, 3 stage failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "paragraph/ablation.hpp"
#include "paragraph/ast_json.hpp"
#include "paragraph/checkpoint.hpp"
#include "paragraph/errors.hpp"
#include "paragraph/graph_build.hpp"
#include "paragraph/graph_json.hpp"
#include "paragraph/metrics.hpp"
#include "paragraph/parser.hpp"
#include "paragraph/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace paragraph;

namespace {

enum class LogLevel { Debug = 0, Info, Warn, Error, Quiet };

struct GlobalOpts {
    bool json_output = false;
    int jobs = 1;
    std::optional<std::uint64_t> seed;
    LogLevel log_level = LogLevel::Info;
};

GlobalOpts g_opts;

void log_at(LogLevel level, const std::string& msg) {
    static const char* names[] = {"debug", "info", "warn", "error"};
    if (level < g_opts.log_level || level == LogLevel::Quiet) return;
    std::cerr << "[" << names[static_cast<int>(level)] << "] " << msg << "\n";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DatasetError("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DatasetError("cannot write: " + path);
    out << content;
}

json load_json(const std::string& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw SchemaError(path + ": " + e.what());
    }
}

std::vector<long long> parse_grid(const std::string& csv, const std::string& flag) {
    std::vector<long long> out;
    std::stringstream ss(csv);
    for (std::string item; std::getline(ss, item, ',');) {
        try {
            out.push_back(std::stoll(item));
        } catch (const std::exception&) {
            throw SchemaError(flag + ": not an integer: " + item);
        }
    }
    if (out.empty()) throw SchemaError(flag + ": empty grid");
    return out;
}

ParamBindings parse_bindings(const std::string& csv) {
    ParamBindings b;
    if (csv.empty()) return b;
    std::stringstream ss(csv);
    for (std::string item; std::getline(ss, item, ',');) {
        size_t eq = item.find('=');
        if (eq == std::string::npos) throw SchemaError("--bind expects name=value: " + item);
        std::string name = item.substr(0, eq);
        long long value = 0;
        try {
            value = std::stoll(item.substr(eq + 1));
        } catch (const std::exception&) {
            throw SchemaError("--bind value must be an integer: " + item);
        }
        if (name == "default_trip")
            b.default_trip = value;
        else
            b.values[name] = value;
    }
    return b;
}

std::set<std::string> parse_exclude(const std::string& csv) {
    std::set<std::string> out;
    std::stringstream ss(csv);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) out.insert(item);
    return out;
}

void emit(const json& result, const std::string& plain) {
    if (g_opts.json_output)
        std::cout << result.dump() << "\n";
    else if (!plain.empty())
        std::cout << plain << "\n";
}

// --- subcommand bodies --------------------------------------------------

int cmd_parse(const std::string& file, const std::string& emit_ast) {
    Ast ast = parse_source(read_file(file));
    json doc = ast_to_json(ast);
    if (!emit_ast.empty()) write_file(emit_ast, dump_json(doc));
    if (g_opts.json_output)
        std::cout << doc.dump() << "\n";
    else if (emit_ast.empty())
        std::cout << dump_json(doc);
    else
        std::cout << "parsed " << file << ": " << ast.nodes.size() << " nodes -> " << emit_ast << "\n";
    return 0;
}

int cmd_graph(const std::string& file, long long teams, long long threads,
              const std::string& bind, const std::string& mode_name, const std::string& out) {
    auto mode = graph_mode_from_name(mode_name);
    if (!mode) throw SchemaError("unknown mode: " + mode_name);
    Ast ast = parse_source(read_file(file));
    ParamBindings bindings = parse_bindings(bind);
    ParaGraph g = build_paragraph(ast, bindings, teams, threads, *mode,
                                  [](const std::string& m) { log_at(LogLevel::Warn, m); });
    json doc = paragraph_to_json(g);
    if (out.empty())
        std::cout << (g_opts.json_output ? doc.dump() + "\n" : dump_json(doc));
    else {
        write_file(out, dump_json(doc));
        emit({{"nodes", g.nodes.size()}, {"edges", g.edges.size()}, {"out", out}},
             "graph " + file + ": " + std::to_string(g.nodes.size()) + " nodes, " +
                 std::to_string(g.edges.size()) + " edges -> " + out);
    }
    return 0;
}

int cmd_variants(const std::string& kernel_file, const std::string& sizes,
                 const std::string& teams, const std::string& threads, const std::string& out_dir) {
    KernelSpec spec = kernel_spec_from_json(load_json(kernel_file));
    auto entries = write_variants(spec, parse_grid(sizes, "--sizes"), parse_grid(teams, "--teams"),
                                  parse_grid(threads, "--threads"), out_dir);
    emit({{"kernel", spec.kernel_name}, {"points", entries.size()}, {"out", out_dir}},
         std::to_string(entries.size()) + " variants of " + spec.kernel_name + " -> " + out_dir);
    return 0;
}

int cmd_dataset_build(const std::string& variants_dir, const std::string& executor_path,
                      std::optional<std::uint64_t> synthetic_seed, double sigma,
                      std::string app_name, const std::string& platform, const std::string& bind,
                      const std::string& out) {
    LabelerConfig labeler;
    if (!executor_path.empty()) {
        labeler.synthetic = false;
        labeler.executor = load_executor_config(executor_path);
        labeler.platform_tag = platform.empty() ? "local" : platform;
    } else if (synthetic_seed) {
        labeler.synthetic = true;
        labeler.synthetic_seed = *synthetic_seed;
        labeler.synthetic_sigma = sigma;
        labeler.platform_tag = platform.empty() ? "synthetic" : platform;
    } else {
        throw SchemaError("dataset build requires --executor or --synthetic");
    }
    if (app_name.empty())
        app_name = load_json((fs::path(variants_dir) / "manifest.json").string())
                       .value("kernel", "unknown");
    auto points = build_dataset(variants_dir, app_name, parse_bindings(bind), labeler, g_opts.jobs,
                                [](const std::string& m) { log_at(LogLevel::Info, m); });
    write_dataset_jsonl(out, points);
    emit({{"points", points.size()}, {"out", out}},
         std::to_string(points.size()) + " points -> " + out);
    return 0;
}

int cmd_train(const std::string& data_file, const std::string& config_file, const std::string& out,
              const std::string& curve_out, const std::string& val_out, const std::string& exclude) {
    TrainConfig cfg = config_file.empty() ? TrainConfig{} : load_train_config(config_file);
    if (g_opts.seed) cfg.seed = *g_opts.seed;
    if (g_opts.jobs > 1) cfg.jobs = g_opts.jobs;
    auto points = read_dataset_jsonl(data_file, parse_exclude(exclude));
    Split split = split_dataset(points.size(), cfg.seed);

    TrainResult result = train(points, split, cfg, [](const EpochStats& s) {
        log_at(LogLevel::Info, "epoch " + std::to_string(s.epoch) +
                                   " train_loss=" + std::to_string(s.train_loss) +
                                   " val_rmse_ms=" + std::to_string(s.val_rmse_ms));
    });
    checkpoint_save({result.model, result.scaler, cfg.mode}, out);

    if (!curve_out.empty()) {
        json curve = json::array();
        for (const EpochStats& s : result.curve)
            curve.push_back({{"epoch", s.epoch},
                             {"train_loss", s.train_loss},
                             {"val_rmse_ms", s.val_rmse_ms},
                             {"val_norm_rmse", s.val_norm_rmse}});
        write_file(curve_out, dump_json({{"schema_version", 1},
                                         {"best_epoch", result.best_epoch},
                                         {"best_val_rmse_ms", result.best_val_rmse_ms},
                                         {"epochs", std::move(curve)}}));
    }
    if (!val_out.empty()) {
        std::vector<DataPoint> val_points;
        for (std::size_t idx : split.val) val_points.push_back(points[idx]);
        write_dataset_jsonl(val_out, val_points);
    }
    emit({{"best_epoch", result.best_epoch},
          {"best_val_rmse_ms", result.best_val_rmse_ms},
          {"final_val_rmse_ms", result.curve.back().val_rmse_ms},
          {"out", out}},
         "trained " + std::to_string(cfg.epochs) + " epochs; best val RMSE " +
             std::to_string(result.best_val_rmse_ms) + " ms (epoch " +
             std::to_string(result.best_epoch) + ") -> " + out);
    return 0;
}

int cmd_eval(const std::string& ckpt_file, const std::string& data_file, const std::string& out,
             const std::string& csv_out, const std::string& exclude) {
    Checkpoint ckpt = checkpoint_load(ckpt_file);
    auto points = read_dataset_jsonl(data_file, parse_exclude(exclude));
    if (points.empty()) throw MetricError("dataset is empty");
    std::vector<double> predictions;
    predictions.reserve(points.size());
    for (const DataPoint& p : points) {
        ParaGraph g = convert_graph_mode(p.graph, ckpt.mode);
        predictions.push_back(predict_runtime_us(ckpt.model, ckpt.scaler, g));
    }
    MetricReport report = compute_report(points, predictions);
    json doc = report_to_json(report);
    if (!out.empty()) write_file(out, dump_json(doc));
    if (!csv_out.empty()) write_file(csv_out, report_to_csv(report));
    emit(doc, "rmse_ms=" + std::to_string(report.rmse_ms) +
                  " norm_rmse=" + std::to_string(report.norm_rmse) + " n=" +
                  std::to_string(report.n) + (out.empty() ? "" : " -> " + out));
    return 0;
}

int cmd_ablate(const std::string& data_file, const std::string& config_file,
               const std::string& out, const std::string& exclude) {
    TrainConfig cfg = config_file.empty() ? TrainConfig{} : load_train_config(config_file);
    if (g_opts.seed) cfg.seed = *g_opts.seed;
    if (g_opts.jobs > 1) cfg.jobs = g_opts.jobs;
    auto points = read_dataset_jsonl(data_file, parse_exclude(exclude));
    Split split = split_dataset(points.size(), cfg.seed);
    AblationResult result = run_ablation(points, split, cfg, [](GraphMode mode, const EpochStats& s) {
        if (s.epoch % 25 == 0)
            log_at(LogLevel::Info, std::string(graph_mode_name(mode)) + " epoch " +
                                       std::to_string(s.epoch) + " val_rmse_ms=" +
                                       std::to_string(s.val_rmse_ms));
    });
    json doc = ablation_to_json(result);
    if (!out.empty()) write_file(out, dump_json(doc));
    std::ostringstream line;
    for (const AblationEntry& e : result.entries)
        line << graph_mode_name(e.mode) << "=" << e.final_val_rmse_ms << "ms ";
    emit(doc, "final val RMSE: " + line.str() + (out.empty() ? "" : "-> " + out));
    return 0;
}

int cmd_predict(const std::string& ckpt_file, const std::string& graph_file,
                std::optional<long long> teams, std::optional<long long> threads) {
    Checkpoint ckpt = checkpoint_load(ckpt_file);
    ParaGraph g = paragraph_from_json(load_json(graph_file));
    if (teams) g.features.num_teams = *teams;
    if (threads) g.features.num_threads = *threads;
    double us = predict_runtime_us(ckpt.model, ckpt.scaler, convert_graph_mode(g, ckpt.mode));
    emit({{"predicted_ms", us / 1000.0}, {"predicted_us", us}},
         "predicted runtime: " + std::to_string(us / 1000.0) + " ms");
    return 0;
}

int cmd_pipeline(const std::string& config_file) {
    PipelineConfig cfg = pipeline_config_from_json(load_json(config_file));
    if (g_opts.seed) cfg.training.seed = *g_opts.seed;
    if (g_opts.jobs > 1) {
        cfg.jobs = g_opts.jobs;
        cfg.training.jobs = g_opts.jobs;
    }
    run_pipeline(cfg, [](const std::string& m) { log_at(LogLevel::Info, m); });
    emit({{"out_dir", cfg.out_dir}}, "pipeline complete -> " + cfg.out_dir);
    return 0;
}

int error_record(const std::string& kind, const std::string& message, int code) {
    json record = {{"error", {{"kind", kind}, {"message", message}, {"exit", code}}}};
    std::cerr << record.dump() << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"weighted program-graph construction and GNN runtime prediction for OpenMP kernels"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string log_level = "info";
    app.add_flag("--json", g_opts.json_output, "machine-readable JSON on stdout");
    app.add_option("--jobs", g_opts.jobs, "worker threads for measuring/training")
        ->check(CLI::PositiveNumber);
    std::uint64_t seed_opt = 0;
    auto* seed_flag = app.add_option("--seed", seed_opt, "override config seeds");
    app.add_option("--log-level", log_level, "debug|info|warn|error|quiet");

    // parse
    auto* sub_parse = app.add_subcommand("parse", "lex and parse a C file to an AST");
    std::string parse_file, parse_emit;
    sub_parse->add_option("file", parse_file, "C source file")->required();
    sub_parse->add_option("--emit-ast", parse_emit, "write AST JSON here");

    // graph
    auto* sub_graph = app.add_subcommand("graph", "build the weighted program graph for a C file");
    std::string graph_file, graph_bind, graph_mode = "paragraph", graph_out;
    long long graph_teams = 1, graph_threads = 1;
    sub_graph->add_option("file", graph_file)->required();
    sub_graph->add_option("--teams", graph_teams, "num_teams feature")->check(CLI::PositiveNumber);
    sub_graph->add_option("--threads", graph_threads, "num_threads feature and divisor")
        ->check(CLI::PositiveNumber);
    sub_graph->add_option("--bind", graph_bind, "loop-bound symbols, e.g. N=1000,default_trip=10");
    sub_graph->add_option("--mode", graph_mode, "raw|aug|para");
    sub_graph->add_option("-o,--out", graph_out, "output JSON path (stdout when omitted)");

    // variants
    auto* sub_variants = app.add_subcommand("variants", "generate directive variants of a kernel");
    std::string var_kernel, var_sizes, var_teams, var_threads, var_out;
    sub_variants->add_option("kernel", var_kernel, "kernel spec JSON")->required();
    sub_variants->add_option("--sizes", var_sizes, "comma-separated size grid")->required();
    sub_variants->add_option("--teams", var_teams, "comma-separated teams grid")->required();
    sub_variants->add_option("--threads", var_threads, "comma-separated threads grid")->required();
    sub_variants->add_option("-o,--out", var_out, "output directory")->required();

    // dataset build
    auto* sub_dataset = app.add_subcommand("dataset", "dataset operations");
    auto* sub_build = sub_dataset->add_subcommand("build", "label variants into a JSONL dataset");
    std::string ds_variants, ds_executor, ds_app, ds_platform, ds_bind, ds_out;
    std::uint64_t ds_seed = 0;
    double ds_sigma = 0.0;
    bool ds_seed_set = false;
    sub_build->add_option("--variants", ds_variants, "variants directory with manifest.json")->required();
    sub_build->add_option("--executor", ds_executor, "executor config JSON (measured labels)");
    auto* ds_seed_opt = sub_build->add_option("--synthetic", ds_seed, "synthetic labeler seed");
    sub_build->add_option("--sigma", ds_sigma, "synthetic lognormal sigma");
    sub_build->add_option("--app", ds_app, "application name (default: manifest kernel)");
    sub_build->add_option("--platform", ds_platform, "platform tag");
    sub_build->add_option("--bind", ds_bind, "extra loop-bound symbols");
    sub_build->add_option("-o,--out", ds_out, "output JSONL")->required();

    // train
    auto* sub_train = app.add_subcommand("train", "train the runtime model");
    std::string tr_data, tr_config, tr_out, tr_curve, tr_val, tr_exclude;
    sub_train->add_option("data", tr_data, "dataset JSONL")->required();
    sub_train->add_option("--config", tr_config, "training config JSON");
    sub_train->add_option("-o,--out", tr_out, "checkpoint path")->required();
    sub_train->add_option("--curve", tr_curve, "write per-epoch RMSE curve JSON");
    sub_train->add_option("--emit-val", tr_val, "write the validation slice as JSONL");
    sub_train->add_option("--exclude", tr_exclude, "comma-separated app names to drop");

    // eval
    auto* sub_eval = app.add_subcommand("eval", "evaluate a checkpoint against a dataset");
    std::string ev_ckpt, ev_data, ev_out, ev_csv, ev_exclude;
    sub_eval->add_option("checkpoint", ev_ckpt)->required();
    sub_eval->add_option("data", ev_data)->required();
    sub_eval->add_option("-o,--out", ev_out, "report JSON path");
    sub_eval->add_option("--csv", ev_csv, "also write CSV");
    sub_eval->add_option("--exclude", ev_exclude, "comma-separated app names to drop");

    // ablate
    auto* sub_ablate = app.add_subcommand("ablate", "compare raw/augmented/weighted graph modes");
    std::string ab_data, ab_config, ab_out, ab_exclude;
    sub_ablate->add_option("data", ab_data)->required();
    sub_ablate->add_option("--config", ab_config, "training config JSON");
    sub_ablate->add_option("-o,--out", ab_out, "ablation JSON path");
    sub_ablate->add_option("--exclude", ab_exclude, "comma-separated app names to drop");

    // predict
    auto* sub_predict = app.add_subcommand("predict", "predict runtime for one graph");
    std::string pr_ckpt, pr_graph;
    long long pr_teams = 0, pr_threads = 0;
    sub_predict->add_option("checkpoint", pr_ckpt)->required();
    sub_predict->add_option("graph", pr_graph, "graph JSON")->required();
    auto* pr_teams_opt = sub_predict->add_option("--teams", pr_teams)->check(CLI::PositiveNumber);
    auto* pr_threads_opt = sub_predict->add_option("--threads", pr_threads)->check(CLI::PositiveNumber);

    // pipeline
    auto* sub_pipeline = app.add_subcommand("pipeline", "run the whole workflow from one config");
    std::string pl_config;
    sub_pipeline->add_option("--config", pl_config, "pipeline config JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return error_record("UsageError", e.what(), 1);
    }

    if (log_level == "debug") g_opts.log_level = LogLevel::Debug;
    else if (log_level == "info") g_opts.log_level = LogLevel::Info;
    else if (log_level == "warn") g_opts.log_level = LogLevel::Warn;
    else if (log_level == "error") g_opts.log_level = LogLevel::Error;
    else if (log_level == "quiet") g_opts.log_level = LogLevel::Quiet;
    else return error_record("UsageError", "unknown log level: " + log_level, 1);
    if (seed_flag->count()) g_opts.seed = seed_opt;
    ds_seed_set = ds_seed_opt->count() > 0;

    try {
        if (sub_parse->parsed()) return cmd_parse(parse_file, parse_emit);
        if (sub_graph->parsed())
            return cmd_graph(graph_file, graph_teams, graph_threads, graph_bind, graph_mode, graph_out);
        if (sub_variants->parsed())
            return cmd_variants(var_kernel, var_sizes, var_teams, var_threads, var_out);
        if (sub_dataset->parsed() && sub_build->parsed())
            return cmd_dataset_build(ds_variants, ds_executor,
                                     ds_seed_set ? std::optional<std::uint64_t>(ds_seed) : std::nullopt,
                                     ds_sigma, ds_app, ds_platform, ds_bind, ds_out);
        if (sub_train->parsed()) return cmd_train(tr_data, tr_config, tr_out, tr_curve, tr_val, tr_exclude);
        if (sub_eval->parsed()) return cmd_eval(ev_ckpt, ev_data, ev_out, ev_csv, ev_exclude);
        if (sub_ablate->parsed()) return cmd_ablate(ab_data, ab_config, ab_out, ab_exclude);
        if (sub_predict->parsed())
            return cmd_predict(pr_ckpt, pr_graph,
                               pr_teams_opt->count() ? std::optional<long long>(pr_teams) : std::nullopt,
                               pr_threads_opt->count() ? std::optional<long long>(pr_threads) : std::nullopt);
        if (sub_pipeline->parsed()) return cmd_pipeline(pl_config);
        return error_record("UsageError", "no subcommand", 1);
    } catch (const Error& e) {
        int code = e.error_class() == ErrorClass::Input ? 2 : 3;
        return error_record(e.kind(), e.message(), code);
    } catch (const std::exception& e) {
        return error_record("InternalError", e.what(), 3);
    }
}
