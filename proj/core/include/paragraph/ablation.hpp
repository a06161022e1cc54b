#pragma once

#include <array>
#include <functional>

#include <json.hpp>

#include "paragraph/train.hpp"

namespace paragraph {

struct AblationEntry {
    GraphMode mode = GraphMode::RawAst;
    double final_val_rmse_ms = 0.0;
    double final_val_norm_rmse = 0.0;
    double best_val_rmse_ms = 0.0;
    int best_epoch = 0;
    std::vector<EpochStats> curve;
};

struct AblationResult {
    std::array<AblationEntry, 3> entries;  // raw_ast, augmented_ast, paragraph

    const AblationEntry& entry(GraphMode mode) const;
};

/// Trains one model per mode (raw_ast, augmented_ast, paragraph) with
/// identical seed and hyperparameters; reports final and best validation
/// RMSE plus the per-epoch curves.
AblationResult run_ablation(const std::vector<DataPoint>& points, const Split& split,
                            const TrainConfig& base_cfg,
                            const std::function<void(GraphMode, const EpochStats&)>& on_epoch = nullptr);

nlohmann::json ablation_to_json(const AblationResult& result);

}  // namespace paragraph
