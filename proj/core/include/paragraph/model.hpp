#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "paragraph/rgat.hpp"
#include "paragraph/rng.hpp"
#include "paragraph/tensor.hpp"

namespace paragraph {

inline constexpr int kNumNodeKinds = 19;

struct ModelConfig {
    int hidden = 64;       // node state width d
    int head1 = 64;        // first dense layer after pooling
    int head2 = 32;        // second dense layer
    int feat_embed = 16;   // width of the (teams, threads) embedding
    double leaky_slope = 0.2;

    bool operator==(const ModelConfig&) const = default;
};

nlohmann::json model_config_to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const nlohmann::json& doc);

/// All trainable parameters. Gradients reuse the same structure.
struct ModelParams {
    ModelConfig cfg;
    Tensor embedding;  // kNumNodeKinds x hidden
    std::array<RgatLayerParams, 3> layers;
    Tensor head1_w, head1_b;  // hidden x head1, head1
    Tensor head2_w, head2_b;  // head1 x head2, head2
    Tensor feat_w, feat_b;    // 2 x feat_embed, feat_embed
    Tensor out_w, out_b;      // (head2 + feat_embed) x 1, 1

    static ModelParams zeros(const ModelConfig& cfg);

    /// Seeded init: embeddings uniform in [-0.1, 0.1], projections
    /// Glorot-uniform, attention vectors and weight gains small uniform,
    /// biases zero.
    static ModelParams init(const ModelConfig& cfg, std::uint64_t seed);

    /// Visits every parameter tensor in a fixed order.
    void for_each(const std::function<void(const std::string&, Tensor&)>& fn);
    void for_each(const std::function<void(const std::string&, const Tensor&)>& fn) const;

    std::int64_t parameter_count() const;
};

struct ForwardCache {
    Tensor h0;
    std::array<RgatLayerCache, 3> layer_caches;
    Tensor h3;
    std::vector<double> pooled;
    std::vector<double> z1, z1_pre;
    std::vector<double> z2, z2_pre;
    std::vector<double> feat, feat_pre;
    double prediction = 0.0;
};

/// Scaled-runtime prediction for one prepared graph.
double model_forward(const ModelParams& params, const GraphInput& graph,
                     ForwardCache* cache = nullptr);

/// Accumulates d(prediction * d_prediction)/d(theta) into `grads`.
void model_backward(const ModelParams& params, const GraphInput& graph, const ForwardCache& cache,
                    double d_prediction, ModelParams& grads);

/// Mean squared error over the batch plus analytic gradients.
/// Throws ShapeError on an empty batch or mismatched lengths.
double loss_and_gradients(const ModelParams& params, const std::vector<GraphInput>& batch,
                          const std::vector<double>& targets, ModelParams& grads);

}  // namespace paragraph
