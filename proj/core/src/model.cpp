#include "paragraph/model.hpp"

#include <cmath>

#include "paragraph/errors.hpp"

namespace paragraph {

nlohmann::json model_config_to_json(const ModelConfig& cfg) {
    return {{"hidden", cfg.hidden},
            {"head1", cfg.head1},
            {"head2", cfg.head2},
            {"feat_embed", cfg.feat_embed},
            {"leaky_slope", cfg.leaky_slope}};
}

ModelConfig model_config_from_json(const nlohmann::json& doc) {
    ModelConfig cfg;
    cfg.hidden = doc.value("hidden", cfg.hidden);
    cfg.head1 = doc.value("head1", cfg.head1);
    cfg.head2 = doc.value("head2", cfg.head2);
    cfg.feat_embed = doc.value("feat_embed", cfg.feat_embed);
    cfg.leaky_slope = doc.value("leaky_slope", cfg.leaky_slope);
    if (cfg.hidden < 1 || cfg.head1 < 1 || cfg.head2 < 1 || cfg.feat_embed < 1)
        throw SchemaError("model dimensions must be positive");
    return cfg;
}

ModelParams ModelParams::zeros(const ModelConfig& cfg) {
    ModelParams p;
    p.cfg = cfg;
    p.embedding = Tensor::zeros({kNumNodeKinds, cfg.hidden});
    for (auto& layer : p.layers) layer = RgatLayerParams::zeros(cfg.hidden, cfg.hidden);
    p.head1_w = Tensor::zeros({cfg.hidden, cfg.head1});
    p.head1_b = Tensor::zeros({cfg.head1});
    p.head2_w = Tensor::zeros({cfg.head1, cfg.head2});
    p.head2_b = Tensor::zeros({cfg.head2});
    p.feat_w = Tensor::zeros({2, cfg.feat_embed});
    p.feat_b = Tensor::zeros({cfg.feat_embed});
    p.out_w = Tensor::zeros({cfg.head2 + cfg.feat_embed, 1});
    p.out_b = Tensor::zeros({1});
    return p;
}

namespace {

void glorot(Tensor& t, Rng& rng) {
    double fan_in = t.rows(), fan_out = t.cols();
    double s = std::sqrt(6.0 / (fan_in + fan_out));
    for (double& v : t.data) v = rng.uniform(-s, s);
}

void small_uniform(Tensor& t, Rng& rng, double s = 0.1) {
    for (double& v : t.data) v = rng.uniform(-s, s);
}

}  // namespace

ModelParams ModelParams::init(const ModelConfig& cfg, std::uint64_t seed) {
    ModelParams p = zeros(cfg);
    Rng rng(seed);
    small_uniform(p.embedding, rng);
    for (auto& layer : p.layers) {
        for (auto& W : layer.proj) glorot(W, rng);
        for (auto& a : layer.attn) small_uniform(a, rng);
        small_uniform(layer.weight_gain, rng);
        glorot(layer.self_proj, rng);
    }
    glorot(p.head1_w, rng);
    glorot(p.head2_w, rng);
    glorot(p.feat_w, rng);
    glorot(p.out_w, rng);
    return p;
}

void ModelParams::for_each(const std::function<void(const std::string&, Tensor&)>& fn) {
    fn("embedding", embedding);
    for (std::size_t l = 0; l < layers.size(); l++)
        layers[l].for_each(fn, "layer" + std::to_string(l));
    fn("head1_w", head1_w);
    fn("head1_b", head1_b);
    fn("head2_w", head2_w);
    fn("head2_b", head2_b);
    fn("feat_w", feat_w);
    fn("feat_b", feat_b);
    fn("out_w", out_w);
    fn("out_b", out_b);
}

void ModelParams::for_each(const std::function<void(const std::string&, const Tensor&)>& fn) const {
    const_cast<ModelParams*>(this)->for_each(
        [&](const std::string& name, Tensor& t) { fn(name, t); });
}

std::int64_t ModelParams::parameter_count() const {
    std::int64_t n = 0;
    for_each([&](const std::string&, const Tensor& t) { n += t.size(); });
    return n;
}

namespace {

// z = relu(x^T W + b); returns pre-activation in `pre`
std::vector<double> dense_relu(const std::vector<double>& x, const Tensor& W, const Tensor& b,
                               std::vector<double>& pre) {
    int d_in = W.rows(), d_out = W.cols();
    if (static_cast<int>(x.size()) != d_in)
        throw ShapeError("dense input " + std::to_string(x.size()) + " != " + std::to_string(d_in));
    pre.assign(static_cast<std::size_t>(d_out), 0.0);
    for (int i = 0; i < d_in; i++) {
        double v = x[static_cast<std::size_t>(i)];
        if (v == 0.0) continue;
        for (int j = 0; j < d_out; j++) pre[static_cast<std::size_t>(j)] += v * W.at(i, j);
    }
    std::vector<double> out(static_cast<std::size_t>(d_out));
    for (int j = 0; j < d_out; j++) {
        pre[static_cast<std::size_t>(j)] += b.at(j);
        out[static_cast<std::size_t>(j)] = std::max(0.0, pre[static_cast<std::size_t>(j)]);
    }
    return out;
}

// gradient of a dense+relu block; returns d_input
std::vector<double> dense_relu_backward(const std::vector<double>& x, const Tensor& W,
                                        const std::vector<double>& pre,
                                        const std::vector<double>& d_out, Tensor& dW, Tensor& db) {
    int d_in = W.rows(), d_outn = W.cols();
    std::vector<double> d_pre(static_cast<std::size_t>(d_outn));
    for (int j = 0; j < d_outn; j++)
        d_pre[static_cast<std::size_t>(j)] =
            pre[static_cast<std::size_t>(j)] > 0.0 ? d_out[static_cast<std::size_t>(j)] : 0.0;
    std::vector<double> d_x(static_cast<std::size_t>(d_in), 0.0);
    for (int i = 0; i < d_in; i++) {
        double acc = 0.0;
        for (int j = 0; j < d_outn; j++) {
            dW.at(i, j) += x[static_cast<std::size_t>(i)] * d_pre[static_cast<std::size_t>(j)];
            acc += W.at(i, j) * d_pre[static_cast<std::size_t>(j)];
        }
        d_x[static_cast<std::size_t>(i)] = acc;
    }
    for (int j = 0; j < d_outn; j++) db.at(j) += d_pre[static_cast<std::size_t>(j)];
    return d_x;
}

}  // namespace

double model_forward(const ModelParams& params, const GraphInput& graph, ForwardCache* cache) {
    const ModelConfig& cfg = params.cfg;
    int n = graph.num_nodes;
    if (n < 1) throw ShapeError("graph has no nodes");

    Tensor h = Tensor::zeros({n, cfg.hidden});
    for (int i = 0; i < n; i++) {
        int kind = graph.kinds[static_cast<std::size_t>(i)];
        if (kind < 0 || kind >= kNumNodeKinds) throw ShapeError("node kind ordinal out of range");
        for (int j = 0; j < cfg.hidden; j++) h.at(i, j) = params.embedding.at(kind, j);
    }

    ForwardCache local;
    ForwardCache& c = cache ? *cache : local;
    c.h0 = h;
    for (std::size_t l = 0; l < 3; l++)
        h = rgat_forward(params.layers[l], h, graph, cfg.leaky_slope, &c.layer_caches[l]);
    c.h3 = h;

    c.pooled.assign(static_cast<std::size_t>(cfg.hidden), 0.0);
    for (int i = 0; i < n; i++)
        for (int j = 0; j < cfg.hidden; j++)
            c.pooled[static_cast<std::size_t>(j)] += h.at(i, j) / n;

    c.z1 = dense_relu(c.pooled, params.head1_w, params.head1_b, c.z1_pre);
    c.z2 = dense_relu(c.z1, params.head2_w, params.head2_b, c.z2_pre);
    c.feat = dense_relu({graph.teams, graph.threads}, params.feat_w, params.feat_b, c.feat_pre);

    double y = params.out_b.at(0);
    for (int j = 0; j < cfg.head2; j++) y += c.z2[static_cast<std::size_t>(j)] * params.out_w.at(j, 0);
    for (int j = 0; j < cfg.feat_embed; j++)
        y += c.feat[static_cast<std::size_t>(j)] * params.out_w.at(cfg.head2 + j, 0);
    c.prediction = y;
    return y;
}

void model_backward(const ModelParams& params, const GraphInput& graph, const ForwardCache& cache,
                    double d_prediction, ModelParams& grads) {
    const ModelConfig& cfg = params.cfg;
    int n = graph.num_nodes;

    grads.out_b.at(0) += d_prediction;
    std::vector<double> d_z2(static_cast<std::size_t>(cfg.head2));
    std::vector<double> d_feat(static_cast<std::size_t>(cfg.feat_embed));
    for (int j = 0; j < cfg.head2; j++) {
        grads.out_w.at(j, 0) += d_prediction * cache.z2[static_cast<std::size_t>(j)];
        d_z2[static_cast<std::size_t>(j)] = d_prediction * params.out_w.at(j, 0);
    }
    for (int j = 0; j < cfg.feat_embed; j++) {
        grads.out_w.at(cfg.head2 + j, 0) += d_prediction * cache.feat[static_cast<std::size_t>(j)];
        d_feat[static_cast<std::size_t>(j)] = d_prediction * params.out_w.at(cfg.head2 + j, 0);
    }

    dense_relu_backward({graph.teams, graph.threads}, params.feat_w, cache.feat_pre, d_feat,
                        grads.feat_w, grads.feat_b);
    std::vector<double> d_z1 = dense_relu_backward(cache.z1, params.head2_w, cache.z2_pre, d_z2,
                                                   grads.head2_w, grads.head2_b);
    std::vector<double> d_pooled = dense_relu_backward(cache.pooled, params.head1_w, cache.z1_pre,
                                                       d_z1, grads.head1_w, grads.head1_b);

    Tensor d_h = Tensor::zeros({n, cfg.hidden});
    for (int i = 0; i < n; i++)
        for (int j = 0; j < cfg.hidden; j++)
            d_h.at(i, j) = d_pooled[static_cast<std::size_t>(j)] / n;

    for (int l = 2; l >= 0; l--)
        d_h = rgat_backward(params.layers[static_cast<std::size_t>(l)], graph,
                            cache.layer_caches[static_cast<std::size_t>(l)], d_h, cfg.leaky_slope,
                            grads.layers[static_cast<std::size_t>(l)]);

    for (int i = 0; i < n; i++) {
        int kind = graph.kinds[static_cast<std::size_t>(i)];
        for (int j = 0; j < cfg.hidden; j++) grads.embedding.at(kind, j) += d_h.at(i, j);
    }
}

double loss_and_gradients(const ModelParams& params, const std::vector<GraphInput>& batch,
                          const std::vector<double>& targets, ModelParams& grads) {
    if (batch.empty()) throw ShapeError("empty batch");
    if (batch.size() != targets.size())
        throw ShapeError("batch/target length mismatch: " + std::to_string(batch.size()) + " vs " +
                         std::to_string(targets.size()));
    double loss = 0.0;
    double inv = 1.0 / static_cast<double>(batch.size());
    for (std::size_t i = 0; i < batch.size(); i++) {
        ForwardCache cache;
        double y = model_forward(params, batch[i], &cache);
        double err = y - targets[i];
        loss += err * err * inv;
        model_backward(params, batch[i], cache, 2.0 * err * inv, grads);
    }
    return loss;
}

}  // namespace paragraph
