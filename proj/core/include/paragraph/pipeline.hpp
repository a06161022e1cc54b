#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "paragraph/dataset.hpp"
#include "paragraph/measure.hpp"
#include "paragraph/train.hpp"
#include "paragraph/variant.hpp"

namespace paragraph {

using LogSink = std::function<void(const std::string&)>;

struct VariantFileEntry {
    std::string file;     // kernel-only source (frontend-parseable)
    std::string harness;  // self-contained timing harness
    VariantKind kind = VariantKind::Cpu;
    VariantParams params;
};

/// Writes one .c (plus .main.c harness) per enumerated point and a
/// manifest.json describing them; returns the manifest entries.
std::vector<VariantFileEntry> write_variants(const KernelSpec& spec,
                                             const std::vector<long long>& sizes,
                                             const std::vector<long long>& teams,
                                             const std::vector<long long>& threads,
                                             const std::string& out_dir);

std::vector<VariantFileEntry> read_variant_manifest(const std::string& dir);

struct LabelerConfig {
    bool synthetic = true;
    std::uint64_t synthetic_seed = 1;
    double synthetic_sigma = 0.0;
    std::optional<ExecutorConfig> executor;  // when !synthetic
    std::string platform_tag = "synthetic";
};

/// Parses every variant in the manifest, builds its paragraph-mode graph
/// (bindings = point sizes merged over base bindings), labels it, and
/// returns the points in manifest order. Measurement may run on `jobs`
/// threads; results are still written in manifest order.
std::vector<DataPoint> build_dataset(const std::string& variants_dir, const std::string& app_name,
                                     const ParamBindings& base_bindings, const LabelerConfig& labeler,
                                     int jobs = 1, const LogSink& log = nullptr);

struct PipelineConfig {
    std::string out_dir;
    std::vector<std::string> kernel_files;
    ParamBindings bindings;
    std::vector<long long> sizes;
    std::vector<long long> teams;
    std::vector<long long> threads;
    LabelerConfig labeler;
    TrainConfig training;
    int jobs = 1;
};

PipelineConfig pipeline_config_from_json(const nlohmann::json& doc);
PipelineConfig load_pipeline_config(const std::string& path);

/// Runs variants -> dataset -> train -> eval, persisting every
/// intermediate artifact under out_dir so each stage can be re-run
/// independently:
///   variants/<kernel>/...  dataset.jsonl  val.jsonl  model.ckpt
///   curve.json  report.json
void run_pipeline(const PipelineConfig& cfg, const LogSink& log = nullptr);

}  // namespace paragraph
