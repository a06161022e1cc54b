#pragma once

#include <cstdint>

#include "paragraph/model.hpp"

namespace paragraph {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Standard Adam with bias correction; first/second moments live in the
/// optimizer between steps.
class AdamOptimizer {
public:
    explicit AdamOptimizer(const ModelConfig& cfg)
        : first_(ModelParams::zeros(cfg)), second_(ModelParams::zeros(cfg)) {}

    void step(ModelParams& params, const ModelParams& grads, const AdamConfig& cfg);

    std::int64_t step_count() const { return steps_; }

private:
    ModelParams first_;
    ModelParams second_;
    std::int64_t steps_ = 0;
};

}  // namespace paragraph
