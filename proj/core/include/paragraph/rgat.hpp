#pragma once

#include <array>
#include <functional>
#include <vector>

#include "paragraph/dataset.hpp"
#include "paragraph/graph.hpp"
#include "paragraph/tensor.hpp"

namespace paragraph {

/// Relation-typed edge list prepared for message passing: per relation,
/// edges sorted by destination with group offsets, weights already
/// MinMax-scaled.
struct GraphInput {
    struct REdge {
        int src = 0;
        int dst = 0;
        double w = 0.0;
    };
    struct Relation {
        std::vector<REdge> edges;        // sorted by (dst, src)
        std::vector<int> group_offsets;  // per-destination softmax groups
    };

    int num_nodes = 0;
    std::vector<int> kinds;  // node kind ordinal per node
    std::array<Relation, kNumEdgeTypes> relations;
    double teams = 0.0;    // scaled
    double threads = 0.0;  // scaled
};

GraphInput prepare_graph_input(const ParaGraph& g, const MinMaxScaler& scaler);

/// One relational graph-attention layer: per-relation projections and
/// attention vectors, a per-relation edge-weight gain, a shared self
/// projection, and a bias.
struct RgatLayerParams {
    std::array<Tensor, kNumEdgeTypes> proj;  // d_in x d_out
    std::array<Tensor, kNumEdgeTypes> attn;  // 2*d_out
    Tensor weight_gain;                      // kNumEdgeTypes (u_r)
    Tensor self_proj;                        // d_in x d_out
    Tensor bias;                             // d_out

    static RgatLayerParams zeros(int d_in, int d_out);

    void for_each(const std::function<void(const std::string&, Tensor&)>& fn,
                  const std::string& prefix);
};

/// Per-graph activations cached by the forward pass for the backward
/// pass.
struct RgatLayerCache {
    Tensor input;                                      // n x d_in
    std::array<Tensor, kNumEdgeTypes> projected;       // n x d_out (empty when unused)
    std::array<std::vector<double>, kNumEdgeTypes> pre_logit;  // leaky-relu input per edge
    std::array<std::vector<double>, kNumEdgeTypes> alpha;      // attention per edge
    Tensor pre_activation;                             // n x d_out
    std::vector<int> relation_count;                   // relations present per node
};

/// Forward level rules:
///   logit  = leakyrelu(a_r . [W_r h_src || W_r h_dst]) + u_r * w
///   alpha  = softmax of logits over each destination's in-edges, per relation
///   msg    = sum alpha * (1 + u_r * w) * W_r h_src
///   out    = relu(mean over present relations of msg + W_self h + bias)
/// The (1 + u_r * w) message gain keeps single-in-edge nodes (where the
/// softmax is constant 1) sensitive to their edge weight.
Tensor rgat_forward(const RgatLayerParams& params, const Tensor& node_states,
                    const GraphInput& graph, double leaky_slope, RgatLayerCache* cache);

/// Accumulates parameter gradients into `grads` and returns the gradient
/// with respect to the layer input.
Tensor rgat_backward(const RgatLayerParams& params, const GraphInput& graph,
                     const RgatLayerCache& cache, const Tensor& d_output, double leaky_slope,
                     RgatLayerParams& grads);

}  // namespace paragraph
