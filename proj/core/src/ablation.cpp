#include "paragraph/ablation.hpp"

#include "paragraph/errors.hpp"

namespace paragraph {

const AblationEntry& AblationResult::entry(GraphMode mode) const {
    for (const AblationEntry& e : entries)
        if (e.mode == mode) return e;
    throw MetricError("ablation entry missing");
}

AblationResult run_ablation(const std::vector<DataPoint>& points, const Split& split,
                            const TrainConfig& base_cfg,
                            const std::function<void(GraphMode, const EpochStats&)>& on_epoch) {
    AblationResult result;
    const GraphMode modes[3] = {GraphMode::RawAst, GraphMode::AugmentedAst, GraphMode::Paragraph};
    for (std::size_t i = 0; i < 3; i++) {
        TrainConfig cfg = base_cfg;
        cfg.mode = modes[i];
        auto hook = on_epoch ? std::function<void(const EpochStats&)>(
                                   [&, i](const EpochStats& s) { on_epoch(modes[i], s); })
                             : std::function<void(const EpochStats&)>();
        TrainResult r = train(points, split, cfg, hook);
        AblationEntry& e = result.entries[i];
        e.mode = modes[i];
        e.final_val_rmse_ms = r.curve.back().val_rmse_ms;
        e.final_val_norm_rmse = r.curve.back().val_norm_rmse;
        e.best_val_rmse_ms = r.best_val_rmse_ms;
        e.best_epoch = r.best_epoch;
        e.curve = std::move(r.curve);
    }
    return result;
}

nlohmann::json ablation_to_json(const AblationResult& result) {
    nlohmann::json modes;
    for (const AblationEntry& e : result.entries) {
        nlohmann::json curve = nlohmann::json::array();
        for (const EpochStats& s : e.curve)
            curve.push_back({{"epoch", s.epoch},
                             {"train_loss", s.train_loss},
                             {"val_rmse_ms", s.val_rmse_ms},
                             {"val_norm_rmse", s.val_norm_rmse}});
        modes[graph_mode_name(e.mode)] = {{"final_val_rmse_ms", e.final_val_rmse_ms},
                                          {"final_val_norm_rmse", e.final_val_norm_rmse},
                                          {"best_val_rmse_ms", e.best_val_rmse_ms},
                                          {"best_epoch", e.best_epoch},
                                          {"curve", std::move(curve)}};
    }
    return {{"schema_version", 1}, {"modes", std::move(modes)}};
}

}  // namespace paragraph
