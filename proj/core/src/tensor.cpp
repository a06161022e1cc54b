#include "paragraph/tensor.hpp"

#include <algorithm>

#include "paragraph/errors.hpp"

namespace paragraph {

Tensor Tensor::zeros(std::vector<int> shape) {
    Tensor t;
    t.shape = std::move(shape);
    std::int64_t n = 1;
    for (int d : t.shape) {
        if (d < 0) throw ShapeError("negative extent in " + t.shape_str());
        n *= d;
    }
    t.data.assign(static_cast<std::size_t>(n), 0.0);
    return t;
}

std::int64_t Tensor::size() const { return static_cast<std::int64_t>(data.size()); }

void Tensor::add_scaled(const Tensor& other, double factor) {
    if (!same_shape(other))
        throw ShapeError("add_scaled shape mismatch: " + shape_str() + " vs " + other.shape_str());
    for (std::size_t i = 0; i < data.size(); i++) data[i] += factor * other.data[i];
}

std::string Tensor::shape_str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < shape.size(); i++) s += (i ? "," : "") + std::to_string(shape[i]);
    return s + ")";
}

}  // namespace paragraph
