#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "paragraph/adam.hpp"
#include "paragraph/dataset.hpp"
#include "paragraph/model.hpp"

namespace paragraph {

struct TrainConfig {
    double lr = 1e-3;
    int epochs = 200;
    int batch = 32;
    std::uint64_t seed = 1;
    GraphMode mode = GraphMode::Paragraph;
    ModelConfig model;
    int jobs = 1;
};

TrainConfig train_config_from_json(const nlohmann::json& doc);
nlohmann::json train_config_to_json(const TrainConfig& cfg);
TrainConfig load_train_config(const std::string& path);

struct EpochStats {
    int epoch = 0;
    double train_loss = 0.0;    // mean squared error on scaled targets
    double val_rmse_ms = 0.0;   // denormalized
    double val_norm_rmse = 0.0;
};

struct TrainResult {
    ModelParams model;  // best-validation checkpoint
    MinMaxScaler scaler;
    std::vector<EpochStats> curve;
    int best_epoch = 0;
    double best_val_rmse_ms = 0.0;
};

/// Converts a paragraph-mode point to the requested ablation mode:
/// raw_ast keeps only Child edges, augmented_ast keeps all edges; both
/// reset Child weights to 1.
ParaGraph convert_graph_mode(const ParaGraph& g, GraphMode mode);

/// Mini-batch Adam over the split's train side; validation RMSE recorded
/// each epoch and the best-validation parameters returned.
TrainResult train(const std::vector<DataPoint>& points, const Split& split,
                  const TrainConfig& cfg,
                  const std::function<void(const EpochStats&)>& on_epoch = nullptr);

/// Denormalized prediction (microseconds) for one point.
double predict_runtime_us(const ModelParams& model, const MinMaxScaler& scaler,
                          const ParaGraph& graph);

}  // namespace paragraph
