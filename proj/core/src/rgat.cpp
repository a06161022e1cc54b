#include "paragraph/rgat.hpp"

#include <algorithm>
#include <cmath>

#include "paragraph/errors.hpp"

namespace paragraph {

GraphInput prepare_graph_input(const ParaGraph& g, const MinMaxScaler& scaler) {
    GraphInput input;
    input.num_nodes = static_cast<int>(g.nodes.size());
    input.kinds.reserve(g.nodes.size());
    for (const GraphNode& n : g.nodes) input.kinds.push_back(static_cast<int>(n.kind));
    input.teams = scaler.teams.scale(static_cast<double>(g.features.num_teams));
    input.threads = scaler.threads.scale(static_cast<double>(g.features.num_threads));

    for (const Edge& e : g.edges) {
        auto& rel = input.relations[static_cast<std::size_t>(e.etype)];
        double w = e.etype == EdgeType::Child ? scaler.weights.scale(e.weight) : 0.0;
        rel.edges.push_back({e.src, e.dst, w});
    }
    for (auto& rel : input.relations) {
        std::sort(rel.edges.begin(), rel.edges.end(), [](const auto& a, const auto& b) {
            return std::tie(a.dst, a.src) < std::tie(b.dst, b.src);
        });
        rel.group_offsets.clear();
        for (std::size_t i = 0; i < rel.edges.size(); i++)
            if (i == 0 || rel.edges[i].dst != rel.edges[i - 1].dst)
                rel.group_offsets.push_back(static_cast<int>(i));
        rel.group_offsets.push_back(static_cast<int>(rel.edges.size()));
    }
    return input;
}

RgatLayerParams RgatLayerParams::zeros(int d_in, int d_out) {
    RgatLayerParams p;
    for (int r = 0; r < kNumEdgeTypes; r++) {
        p.proj[static_cast<std::size_t>(r)] = Tensor::zeros({d_in, d_out});
        p.attn[static_cast<std::size_t>(r)] = Tensor::zeros({2 * d_out});
    }
    p.weight_gain = Tensor::zeros({kNumEdgeTypes});
    p.self_proj = Tensor::zeros({d_in, d_out});
    p.bias = Tensor::zeros({d_out});
    return p;
}

void RgatLayerParams::for_each(const std::function<void(const std::string&, Tensor&)>& fn,
                               const std::string& prefix) {
    for (int r = 0; r < kNumEdgeTypes; r++) {
        fn(prefix + ".proj" + std::to_string(r), proj[static_cast<std::size_t>(r)]);
        fn(prefix + ".attn" + std::to_string(r), attn[static_cast<std::size_t>(r)]);
    }
    fn(prefix + ".weight_gain", weight_gain);
    fn(prefix + ".self_proj", self_proj);
    fn(prefix + ".bias", bias);
}

namespace {

inline double leaky_relu(double x, double slope) { return x > 0.0 ? x : slope * x; }
inline double leaky_relu_grad(double x, double slope) { return x > 0.0 ? 1.0 : slope; }

// out = states x weight, shapes (n x d_in) x (d_in x d_out)
Tensor matmul(const Tensor& states, const Tensor& weight) {
    int n = states.rows(), d_in = states.cols(), d_out = weight.cols();
    if (weight.rows() != d_in)
        throw ShapeError("matmul mismatch: " + states.shape_str() + " x " + weight.shape_str());
    Tensor out = Tensor::zeros({n, d_out});
    for (int i = 0; i < n; i++) {
        const double* row = &states.data[static_cast<std::size_t>(i) * d_in];
        double* orow = &out.data[static_cast<std::size_t>(i) * d_out];
        for (int k = 0; k < d_in; k++) {
            double v = row[k];
            if (v == 0.0) continue;
            const double* wrow = &weight.data[static_cast<std::size_t>(k) * d_out];
            for (int j = 0; j < d_out; j++) orow[j] += v * wrow[j];
        }
    }
    return out;
}

}  // namespace

Tensor rgat_forward(const RgatLayerParams& params, const Tensor& node_states,
                    const GraphInput& graph, double leaky_slope, RgatLayerCache* cache) {
    int n = node_states.rows();
    int d_in = node_states.cols();
    int d_out = params.self_proj.cols();
    if (n != graph.num_nodes)
        throw ShapeError("node state count " + std::to_string(n) + " != graph nodes " +
                         std::to_string(graph.num_nodes));
    if (params.self_proj.rows() != d_in)
        throw ShapeError("self projection expects d_in " + std::to_string(params.self_proj.rows()) +
                         ", states have " + std::to_string(d_in));

    std::array<Tensor, kNumEdgeTypes> projected;
    std::array<std::vector<double>, kNumEdgeTypes> pre_logit;
    std::array<std::vector<double>, kNumEdgeTypes> alpha;

    Tensor messages = Tensor::zeros({n, d_out});
    std::vector<int> relation_count(static_cast<std::size_t>(n), 0);

    for (int r = 0; r < kNumEdgeTypes; r++) {
        const auto& rel = graph.relations[static_cast<std::size_t>(r)];
        if (rel.edges.empty()) continue;
        const Tensor& W = params.proj[static_cast<std::size_t>(r)];
        const Tensor& a = params.attn[static_cast<std::size_t>(r)];
        if (W.rows() != d_in || W.cols() != d_out || a.rows() != 2 * d_out)
            throw ShapeError("relation " + std::to_string(r) + " parameter shapes do not chain");
        double u = params.weight_gain.at(r);

        Tensor P = matmul(node_states, W);
        auto& pl = pre_logit[static_cast<std::size_t>(r)];
        auto& al = alpha[static_cast<std::size_t>(r)];
        pl.resize(rel.edges.size());
        al.resize(rel.edges.size());

        for (std::size_t k = 0; k < rel.edges.size(); k++) {
            const auto& e = rel.edges[k];
            double s = 0.0;
            for (int j = 0; j < d_out; j++)
                s += a.at(j) * P.at(e.src, j) + a.at(d_out + j) * P.at(e.dst, j);
            pl[k] = s;
        }
        // per-destination softmax over logits within this relation
        for (std::size_t gi = 0; gi + 1 < rel.group_offsets.size(); gi++) {
            int begin = rel.group_offsets[gi], end = rel.group_offsets[gi + 1];
            double max_logit = -1e300;
            for (int k = begin; k < end; k++) {
                double logit = leaky_relu(pl[static_cast<std::size_t>(k)], leaky_slope) +
                               u * rel.edges[static_cast<std::size_t>(k)].w;
                max_logit = std::max(max_logit, logit);
            }
            double denom = 0.0;
            for (int k = begin; k < end; k++) {
                double logit = leaky_relu(pl[static_cast<std::size_t>(k)], leaky_slope) +
                               u * rel.edges[static_cast<std::size_t>(k)].w;
                al[static_cast<std::size_t>(k)] = std::exp(logit - max_logit);
                denom += al[static_cast<std::size_t>(k)];
            }
            for (int k = begin; k < end; k++) al[static_cast<std::size_t>(k)] /= denom;

            int dst = rel.edges[static_cast<std::size_t>(begin)].dst;
            relation_count[static_cast<std::size_t>(dst)]++;
            for (int k = begin; k < end; k++) {
                const auto& e = rel.edges[static_cast<std::size_t>(k)];
                double gain = al[static_cast<std::size_t>(k)] * (1.0 + u * e.w);
                for (int j = 0; j < d_out; j++) messages.at(dst, j) += gain * P.at(e.src, j);
            }
        }
        projected[static_cast<std::size_t>(r)] = std::move(P);
    }

    Tensor self = matmul(node_states, params.self_proj);
    Tensor pre = Tensor::zeros({n, d_out});
    Tensor out = Tensor::zeros({n, d_out});
    for (int i = 0; i < n; i++) {
        double inv = relation_count[static_cast<std::size_t>(i)] > 0
                         ? 1.0 / relation_count[static_cast<std::size_t>(i)]
                         : 0.0;
        for (int j = 0; j < d_out; j++) {
            double v = messages.at(i, j) * inv + self.at(i, j) + params.bias.at(j);
            pre.at(i, j) = v;
            out.at(i, j) = v > 0.0 ? v : 0.0;
        }
    }

    if (cache) {
        cache->input = node_states;
        cache->projected = std::move(projected);
        cache->pre_logit = std::move(pre_logit);
        cache->alpha = std::move(alpha);
        cache->pre_activation = std::move(pre);
        cache->relation_count = std::move(relation_count);
    }
    return out;
}

Tensor rgat_backward(const RgatLayerParams& params, const GraphInput& graph,
                     const RgatLayerCache& cache, const Tensor& d_output, double leaky_slope,
                     RgatLayerParams& grads) {
    int n = cache.input.rows();
    int d_in = cache.input.cols();
    int d_out = params.self_proj.cols();

    // through the output rectifier
    Tensor d_pre = Tensor::zeros({n, d_out});
    for (int i = 0; i < n; i++)
        for (int j = 0; j < d_out; j++)
            d_pre.at(i, j) = cache.pre_activation.at(i, j) > 0.0 ? d_output.at(i, j) : 0.0;

    for (int i = 0; i < n; i++)
        for (int j = 0; j < d_out; j++) grads.bias.at(j) += d_pre.at(i, j);

    Tensor d_input = Tensor::zeros({n, d_in});

    // self projection: pre += input x self_proj
    for (int i = 0; i < n; i++)
        for (int k = 0; k < d_in; k++) {
            double x = cache.input.at(i, k);
            double acc = 0.0;
            for (int j = 0; j < d_out; j++) {
                grads.self_proj.at(k, j) += x * d_pre.at(i, j);
                acc += params.self_proj.at(k, j) * d_pre.at(i, j);
            }
            d_input.at(i, k) += acc;
        }

    for (int r = 0; r < kNumEdgeTypes; r++) {
        const auto& rel = graph.relations[static_cast<std::size_t>(r)];
        if (rel.edges.empty()) continue;
        const Tensor& P = cache.projected[static_cast<std::size_t>(r)];
        const Tensor& a = params.attn[static_cast<std::size_t>(r)];
        const auto& pl = cache.pre_logit[static_cast<std::size_t>(r)];
        const auto& al = cache.alpha[static_cast<std::size_t>(r)];
        double u = params.weight_gain.at(r);

        Tensor dP = Tensor::zeros({n, d_out});
        double du = 0.0;

        for (std::size_t gi = 0; gi + 1 < rel.group_offsets.size(); gi++) {
            int begin = rel.group_offsets[gi], end = rel.group_offsets[gi + 1];
            int dst = rel.edges[static_cast<std::size_t>(begin)].dst;
            double inv = 1.0 / cache.relation_count[static_cast<std::size_t>(dst)];

            // d(message at dst); mean over relations applied upstream
            std::vector<double> d_msg(static_cast<std::size_t>(d_out));
            for (int j = 0; j < d_out; j++) d_msg[static_cast<std::size_t>(j)] = d_pre.at(dst, j) * inv;

            std::vector<double> d_alpha(static_cast<std::size_t>(end - begin), 0.0);
            for (int k = begin; k < end; k++) {
                const auto& e = rel.edges[static_cast<std::size_t>(k)];
                double gain = 1.0 + u * e.w;
                double dot = 0.0;
                for (int j = 0; j < d_out; j++) {
                    double dm = d_msg[static_cast<std::size_t>(j)];
                    dot += dm * P.at(e.src, j);
                    dP.at(e.src, j) += al[static_cast<std::size_t>(k)] * gain * dm;
                }
                d_alpha[static_cast<std::size_t>(k - begin)] = dot * gain;
                du += al[static_cast<std::size_t>(k)] * dot * e.w;  // through the message gain
            }

            // softmax backward within the destination group
            double weighted_sum = 0.0;
            for (int k = begin; k < end; k++)
                weighted_sum += al[static_cast<std::size_t>(k)] * d_alpha[static_cast<std::size_t>(k - begin)];
            for (int k = begin; k < end; k++) {
                const auto& e = rel.edges[static_cast<std::size_t>(k)];
                double d_logit = al[static_cast<std::size_t>(k)] *
                                 (d_alpha[static_cast<std::size_t>(k - begin)] - weighted_sum);
                du += d_logit * e.w;
                double d_s = d_logit * leaky_relu_grad(pl[static_cast<std::size_t>(k)], leaky_slope);
                for (int j = 0; j < d_out; j++) {
                    grads.attn[static_cast<std::size_t>(r)].at(j) += d_s * P.at(e.src, j);
                    grads.attn[static_cast<std::size_t>(r)].at(d_out + j) += d_s * P.at(e.dst, j);
                    dP.at(e.src, j) += d_s * a.at(j);
                    dP.at(e.dst, j) += d_s * a.at(d_out + j);
                }
            }
        }

        grads.weight_gain.at(r) += du;

        // P = input x W_r
        const Tensor& W = params.proj[static_cast<std::size_t>(r)];
        Tensor& dW = grads.proj[static_cast<std::size_t>(r)];
        for (int i = 0; i < n; i++)
            for (int k = 0; k < d_in; k++) {
                double x = cache.input.at(i, k);
                double acc = 0.0;
                for (int j = 0; j < d_out; j++) {
                    double dp = dP.at(i, j);
                    dW.at(k, j) += x * dp;
                    acc += W.at(k, j) * dp;
                }
                d_input.at(i, k) += acc;
            }
    }

    return d_input;
}

}  // namespace paragraph
