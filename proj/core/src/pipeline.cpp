#include "paragraph/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "paragraph/ast_json.hpp"
#include "paragraph/checkpoint.hpp"
#include "paragraph/errors.hpp"
#include "paragraph/graph_build.hpp"
#include "paragraph/metrics.hpp"
#include "paragraph/parser.hpp"

namespace paragraph {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DatasetError("cannot write " + path.string());
    out << content;
    if (!out) throw DatasetError("write failed: " + path.string());
}

nlohmann::json params_to_json(const VariantParams& p) {
    return {{"sizes", p.sizes}, {"teams", p.num_teams}, {"threads", p.num_threads}};
}

VariantParams params_from_json(const nlohmann::json& j) {
    VariantParams p;
    for (const auto& [name, v] : j.at("sizes").items()) p.sizes[name] = v.get<long long>();
    p.num_teams = j.at("teams").get<long long>();
    p.num_threads = j.at("threads").get<long long>();
    return p;
}

KernelSpec load_kernel_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open kernel spec: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(path + ": " + e.what());
    }
    return kernel_spec_from_json(doc);
}

void log_line(const LogSink& log, const std::string& msg) {
    if (log) log(msg);
}

// stdlib-independent string hash so seeded labels never shift between builds
std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
    return h;
}

}  // namespace

std::vector<VariantFileEntry> write_variants(const KernelSpec& spec,
                                             const std::vector<long long>& sizes,
                                             const std::vector<long long>& teams,
                                             const std::vector<long long>& threads,
                                             const std::string& out_dir) {
    fs::create_directories(out_dir);
    std::vector<KernelVariant> points = enumerate_dataset_points(spec, sizes, teams, threads);

    std::vector<VariantFileEntry> entries;
    nlohmann::json jpoints = nlohmann::json::array();
    for (const KernelVariant& v : points) {
        long long size = v.params.sizes.empty() ? 0 : v.params.sizes.begin()->second;
        std::string stem = spec.kernel_name + "_" + variant_kind_name(v.kind) + "_s" +
                           std::to_string(size) + "_g" + std::to_string(v.params.num_teams) +
                           "_t" + std::to_string(v.params.num_threads);
        VariantFileEntry e;
        e.file = stem + ".c";
        e.harness = stem + ".main.c";
        e.kind = v.kind;
        e.params = v.params;
        write_file(fs::path(out_dir) / e.file, v.source);
        write_file(fs::path(out_dir) / e.harness, generate_harness(spec, v));
        jpoints.push_back({{"file", e.file},
                           {"harness", e.harness},
                           {"kind", variant_kind_name(v.kind)},
                           {"params", params_to_json(v.params)}});
        entries.push_back(std::move(e));
    }
    nlohmann::json manifest = {{"schema_version", 1},
                               {"kernel", spec.kernel_name},
                               {"points", std::move(jpoints)}};
    write_file(fs::path(out_dir) / "manifest.json", dump_json(manifest));
    return entries;
}

std::vector<VariantFileEntry> read_variant_manifest(const std::string& dir) {
    fs::path path = fs::path(dir) / "manifest.json";
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open manifest: " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
    std::vector<VariantFileEntry> entries;
    for (const auto& jp : doc.at("points")) {
        VariantFileEntry e;
        e.file = jp.at("file").get<std::string>();
        e.harness = jp.value("harness", "");
        auto kind = variant_kind_from_name(jp.at("kind").get<std::string>());
        if (!kind) throw SchemaError("unknown kind in manifest: " + jp.at("kind").get<std::string>());
        e.kind = *kind;
        e.params = params_from_json(jp.at("params"));
        entries.push_back(std::move(e));
    }
    return entries;
}

std::vector<DataPoint> build_dataset(const std::string& variants_dir, const std::string& app_name,
                                     const ParamBindings& base_bindings, const LabelerConfig& labeler,
                                     int jobs, const LogSink& log) {
    std::vector<VariantFileEntry> entries = read_variant_manifest(variants_dir);
    std::vector<DataPoint> points(entries.size());

    auto build_graph = [&](const VariantFileEntry& e) {
        std::ifstream in(fs::path(variants_dir) / e.file);
        if (!in) throw DatasetError("cannot open variant: " + e.file);
        std::string source((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        Ast ast = parse_source(source);
        ParamBindings bindings = base_bindings;
        for (const auto& [name, v] : e.params.sizes) bindings.values[name] = v;
        return build_paragraph(ast, bindings, e.params.num_teams, e.params.num_threads,
                               GraphMode::Paragraph);
    };

    for (std::size_t i = 0; i < entries.size(); i++) {
        points[i].graph = build_graph(entries[i]);
        points[i].app_name = app_name;
        points[i].variant_kind = entries[i].kind;
        points[i].platform_tag = labeler.platform_tag;
    }

    if (labeler.synthetic) {
        for (std::size_t i = 0; i < points.size(); i++)
            points[i].runtime_us = synthetic_label(points[i].graph, labeler.synthetic_seed + i,
                                                   labeler.synthetic_sigma);
        return points;
    }

    if (!labeler.executor) throw DatasetError("executor config required for measured labels");
    // measure on up to `jobs` threads; points stay in manifest order
    std::vector<std::exception_ptr> errors(entries.size());
    std::size_t next = 0;
    std::mutex mu;
    auto worker = [&]() {
        for (;;) {
            std::size_t i;
            {
                std::lock_guard<std::mutex> lock(mu);
                if (next >= entries.size()) return;
                i = next++;
            }
            try {
                std::string harness = (fs::path(variants_dir) / entries[i].harness).string();
                points[i].runtime_us = measure_runtime(harness, *labeler.executor,
                                                       [&](const std::string& msg) {
                                                           std::lock_guard<std::mutex> lock(mu);
                                                           log_line(log, msg);
                                                       });
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> threads;
    for (int w = 0; w < std::max(1, jobs); w++) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);
    return points;
}

PipelineConfig pipeline_config_from_json(const nlohmann::json& doc) {
    PipelineConfig cfg;
    cfg.out_dir = doc.at("out_dir").get<std::string>();
    for (const auto& k : doc.at("kernels")) cfg.kernel_files.push_back(k.get<std::string>());
    if (doc.contains("bindings"))
        for (const auto& [name, v] : doc["bindings"].items()) {
            if (name == "default_trip")
                cfg.bindings.default_trip = v.get<long long>();
            else
                cfg.bindings.values[name] = v.get<long long>();
        }
    cfg.sizes = doc.at("sizes").get<std::vector<long long>>();
    cfg.teams = doc.at("teams").get<std::vector<long long>>();
    cfg.threads = doc.at("threads").get<std::vector<long long>>();
    if (cfg.sizes.empty() || cfg.teams.empty() || cfg.threads.empty())
        throw SchemaError("sizes, teams, and threads grids must be nonempty");

    if (doc.contains("executor")) {
        cfg.labeler.synthetic = false;
        cfg.labeler.executor = executor_config_from_json(doc["executor"]);
        cfg.labeler.platform_tag = doc.value("platform", "local");
    } else {
        const auto& js = doc.value("synthetic", nlohmann::json::object());
        cfg.labeler.synthetic = true;
        cfg.labeler.synthetic_seed = js.value("seed", 1);
        cfg.labeler.synthetic_sigma = js.value("sigma", 0.0);
        cfg.labeler.platform_tag = doc.value("platform", "synthetic");
    }
    cfg.training = train_config_from_json(doc.value("training", nlohmann::json::object()));
    cfg.jobs = doc.value("jobs", 1);
    return cfg;
}

PipelineConfig load_pipeline_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open pipeline config: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(path + ": " + e.what());
    }
    return pipeline_config_from_json(doc);
}

void run_pipeline(const PipelineConfig& cfg, const LogSink& log) {
    fs::create_directories(cfg.out_dir);

    std::vector<DataPoint> points;
    for (const std::string& kernel_file : cfg.kernel_files) {
        KernelSpec spec = load_kernel_spec(kernel_file);
        std::string vdir = (fs::path(cfg.out_dir) / "variants" / spec.kernel_name).string();
        log_line(log, "stage variants: " + spec.kernel_name);
        write_variants(spec, cfg.sizes, cfg.teams, cfg.threads, vdir);
        LabelerConfig labeler = cfg.labeler;
        // keep labels reproducible per kernel regardless of kernel order
        labeler.synthetic_seed = cfg.labeler.synthetic_seed + fnv1a(spec.kernel_name) % 100000;
        std::vector<DataPoint> kernel_points =
            build_dataset(vdir, spec.kernel_name, cfg.bindings, labeler, cfg.jobs, log);
        points.insert(points.end(), kernel_points.begin(), kernel_points.end());
    }

    std::string dataset_path = (fs::path(cfg.out_dir) / "dataset.jsonl").string();
    write_dataset_jsonl(dataset_path, points);
    log_line(log, "stage dataset: " + std::to_string(points.size()) + " points -> " + dataset_path);

    Split split = split_dataset(points.size(), cfg.training.seed);
    std::vector<DataPoint> val_points;
    for (std::size_t idx : split.val) val_points.push_back(points[idx]);
    write_dataset_jsonl((fs::path(cfg.out_dir) / "val.jsonl").string(), val_points);

    log_line(log, "stage train: " + std::to_string(split.train.size()) + " train / " +
                      std::to_string(split.val.size()) + " val");
    TrainResult result = train(points, split, cfg.training);

    Checkpoint ckpt{result.model, result.scaler, cfg.training.mode};
    checkpoint_save(ckpt, (fs::path(cfg.out_dir) / "model.ckpt").string());

    nlohmann::json curve = nlohmann::json::array();
    for (const EpochStats& s : result.curve)
        curve.push_back({{"epoch", s.epoch},
                         {"train_loss", s.train_loss},
                         {"val_rmse_ms", s.val_rmse_ms},
                         {"val_norm_rmse", s.val_norm_rmse}});
    write_file(fs::path(cfg.out_dir) / "curve.json",
               dump_json({{"schema_version", 1},
                          {"best_epoch", result.best_epoch},
                          {"best_val_rmse_ms", result.best_val_rmse_ms},
                          {"epochs", std::move(curve)}}));

    std::vector<double> predictions;
    for (const DataPoint& p : val_points) {
        ParaGraph g = convert_graph_mode(p.graph, cfg.training.mode);
        predictions.push_back(predict_runtime_us(result.model, result.scaler, g));
    }
    MetricReport report = compute_report(val_points, predictions);
    write_file(fs::path(cfg.out_dir) / "report.json", dump_json(report_to_json(report)));
    log_line(log, "stage eval: rmse_ms=" + std::to_string(report.rmse_ms) +
                      " norm_rmse=" + std::to_string(report.norm_rmse));
}

}  // namespace paragraph
