#include "paragraph/adam.hpp"

#include <cmath>
#include <vector>

#include "paragraph/errors.hpp"

namespace paragraph {

namespace {

std::vector<Tensor*> collect(ModelParams& p) {
    std::vector<Tensor*> out;
    p.for_each([&](const std::string&, Tensor& t) { out.push_back(&t); });
    return out;
}

}  // namespace

void AdamOptimizer::step(ModelParams& params, const ModelParams& grads, const AdamConfig& cfg) {
    steps_++;
    auto ps = collect(params);
    auto gs = collect(const_cast<ModelParams&>(grads));
    auto ms = collect(first_);
    auto vs = collect(second_);

    double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(steps_));
    double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(steps_));

    for (std::size_t t = 0; t < ps.size(); t++) {
        if (!ps[t]->same_shape(*gs[t]))
            throw ShapeError("gradient shape " + gs[t]->shape_str() + " != parameter shape " +
                             ps[t]->shape_str());
        for (std::size_t i = 0; i < ps[t]->data.size(); i++) {
            double g = gs[t]->data[i];
            double& m = ms[t]->data[i];
            double& v = vs[t]->data[i];
            m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
            v = cfg.beta2 * v + (1.0 - cfg.beta2) * g * g;
            ps[t]->data[i] -= cfg.lr * (m / bc1) / (std::sqrt(v / bc2) + cfg.eps);
        }
    }
}

}  // namespace paragraph
