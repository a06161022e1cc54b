#include "paragraph/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <thread>

#include "paragraph/errors.hpp"
#include "paragraph/metrics.hpp"
#include "paragraph/rng.hpp"

namespace paragraph {

TrainConfig train_config_from_json(const nlohmann::json& doc) {
    TrainConfig cfg;
    cfg.lr = doc.value("lr", cfg.lr);
    cfg.epochs = doc.value("epochs", cfg.epochs);
    cfg.batch = doc.value("batch", cfg.batch);
    cfg.seed = doc.value("seed", cfg.seed);
    cfg.jobs = doc.value("jobs", cfg.jobs);
    if (doc.contains("mode")) {
        auto mode = graph_mode_from_name(doc["mode"].get<std::string>());
        if (!mode) throw SchemaError("unknown mode: " + doc["mode"].get<std::string>());
        cfg.mode = *mode;
    }
    cfg.model = model_config_from_json(doc);
    if (cfg.epochs < 1 || cfg.batch < 1 || cfg.jobs < 1)
        throw SchemaError("epochs, batch, and jobs must be positive");
    if (cfg.lr < 0.0) throw SchemaError("lr must be nonnegative");
    return cfg;
}

nlohmann::json train_config_to_json(const TrainConfig& cfg) {
    nlohmann::json doc = model_config_to_json(cfg.model);
    doc["lr"] = cfg.lr;
    doc["epochs"] = cfg.epochs;
    doc["batch"] = cfg.batch;
    doc["seed"] = cfg.seed;
    doc["mode"] = graph_mode_name(cfg.mode);
    doc["jobs"] = cfg.jobs;
    return doc;
}

TrainConfig load_train_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open training config: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(path + ": " + e.what());
    }
    return train_config_from_json(doc);
}

ParaGraph convert_graph_mode(const ParaGraph& g, GraphMode mode) {
    if (mode == GraphMode::Paragraph) return g;
    ParaGraph out;
    out.nodes = g.nodes;
    out.features = g.features;
    for (Edge e : g.edges) {
        if (e.etype == EdgeType::Child) {
            e.weight = 1.0;
        } else if (mode == GraphMode::RawAst) {
            continue;
        }
        out.edges.push_back(e);
    }
    return out;
}

namespace {

// Deterministic multi-threaded batch gradient: each worker accumulates a
// contiguous chunk in order, then chunks are reduced in worker order.
double batch_gradients(const ModelParams& params, const std::vector<GraphInput>& inputs,
                       const std::vector<double>& targets, const std::vector<std::size_t>& batch,
                       int jobs, ModelParams& grads) {
    std::vector<GraphInput> graphs;
    std::vector<double> ys;
    graphs.reserve(batch.size());
    ys.reserve(batch.size());
    for (std::size_t idx : batch) {
        graphs.push_back(inputs[idx]);
        ys.push_back(targets[idx]);
    }
    if (jobs <= 1 || batch.size() < 2) return loss_and_gradients(params, graphs, ys, grads);

    int workers = std::min<int>(jobs, static_cast<int>(batch.size()));
    std::vector<ModelParams> partial;
    partial.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; w++) partial.push_back(ModelParams::zeros(params.cfg));
    std::vector<double> losses(static_cast<std::size_t>(workers), 0.0);

    std::size_t chunk = (batch.size() + static_cast<std::size_t>(workers) - 1) / static_cast<std::size_t>(workers);
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; w++) {
        threads.emplace_back([&, w]() {
            std::size_t begin = static_cast<std::size_t>(w) * chunk;
            std::size_t end = std::min(batch.size(), begin + chunk);
            double inv = 1.0 / static_cast<double>(batch.size());
            for (std::size_t i = begin; i < end; i++) {
                ForwardCache cache;
                double y = model_forward(params, graphs[i], &cache);
                double err = y - ys[i];
                losses[static_cast<std::size_t>(w)] += err * err * inv;
                model_backward(params, graphs[i], cache, 2.0 * err * inv,
                               partial[static_cast<std::size_t>(w)]);
            }
        });
    }
    for (auto& t : threads) t.join();

    double loss = 0.0;
    auto dst = [&grads]() {
        std::vector<Tensor*> out;
        grads.for_each([&](const std::string&, Tensor& t) { out.push_back(&t); });
        return out;
    }();
    for (int w = 0; w < workers; w++) {
        loss += losses[static_cast<std::size_t>(w)];
        std::vector<Tensor*> src;
        partial[static_cast<std::size_t>(w)].for_each(
            [&](const std::string&, Tensor& t) { src.push_back(&t); });
        for (std::size_t t = 0; t < dst.size(); t++) dst[t]->add_scaled(*src[t], 1.0);
    }
    return loss;
}

}  // namespace

TrainResult train(const std::vector<DataPoint>& points, const Split& split,
                  const TrainConfig& cfg, const std::function<void(const EpochStats&)>& on_epoch) {
    if (split.train.empty() || split.val.empty())
        throw DatasetError("split must have nonempty train and validation sides");

    // per-mode view of the dataset; the scaler is fit on train points only
    std::vector<DataPoint> view;
    view.reserve(points.size());
    for (const DataPoint& p : points) {
        DataPoint q = p;
        q.graph = convert_graph_mode(p.graph, cfg.mode);
        view.push_back(std::move(q));
    }
    MinMaxScaler scaler = fit_scaler(view, split.train);

    std::vector<GraphInput> inputs;
    std::vector<double> targets;
    inputs.reserve(view.size());
    targets.reserve(view.size());
    for (const DataPoint& p : view) {
        inputs.push_back(prepare_graph_input(p.graph, scaler));
        targets.push_back(scaler.target.scale(p.runtime_us));
    }

    std::vector<double> val_actual_us;
    for (std::size_t idx : split.val) val_actual_us.push_back(view[idx].runtime_us);

    ModelParams model = ModelParams::init(cfg.model, cfg.seed);
    AdamOptimizer opt(cfg.model);
    AdamConfig adam{.lr = cfg.lr};

    TrainResult result;
    result.scaler = scaler;
    result.model = model;
    result.best_val_rmse_ms = std::numeric_limits<double>::infinity();

    std::vector<std::size_t> order = split.train;
    for (int epoch = 1; epoch <= cfg.epochs; epoch++) {
        Rng shuffle_rng(cfg.seed * 0x9e3779b9ULL + static_cast<std::uint64_t>(epoch));
        shuffle_rng.shuffle(order);

        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t begin = 0; begin < order.size(); begin += static_cast<std::size_t>(cfg.batch)) {
            std::size_t end = std::min(order.size(), begin + static_cast<std::size_t>(cfg.batch));
            std::vector<std::size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(begin),
                                           order.begin() + static_cast<std::ptrdiff_t>(end));
            ModelParams grads = ModelParams::zeros(cfg.model);
            epoch_loss += batch_gradients(model, inputs, targets, batch, cfg.jobs, grads);
            opt.step(model, grads, adam);
            batches++;
        }

        std::vector<double> val_pred_us;
        val_pred_us.reserve(split.val.size());
        for (std::size_t idx : split.val) {
            double y = model_forward(model, inputs[idx], nullptr);
            val_pred_us.push_back(scaler.target.unscale(y));
        }
        EpochStats stats;
        stats.epoch = epoch;
        stats.train_loss = batches ? epoch_loss / static_cast<double>(batches) : 0.0;
        stats.val_rmse_ms = rmse_ms(val_actual_us, val_pred_us);
        stats.val_norm_rmse = normalized_rmse(val_actual_us, val_pred_us);
        result.curve.push_back(stats);
        if (on_epoch) on_epoch(stats);

        if (stats.val_rmse_ms < result.best_val_rmse_ms) {
            result.best_val_rmse_ms = stats.val_rmse_ms;
            result.best_epoch = epoch;
            result.model = model;
        }
    }
    return result;
}

double predict_runtime_us(const ModelParams& model, const MinMaxScaler& scaler,
                          const ParaGraph& graph) {
    GraphInput input = prepare_graph_input(graph, scaler);
    double y = model_forward(model, input, nullptr);
    return scaler.target.unscale(y);
}

}  // namespace paragraph
