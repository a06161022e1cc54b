#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace paragraph {

/// Dense row-major tensor of doubles. Rank 1 and 2 cover everything the
/// model needs.
struct Tensor {
    std::vector<int> shape;
    std::vector<double> data;

    Tensor() = default;

    static Tensor zeros(std::vector<int> shape);
    static Tensor zeros_like(const Tensor& other) { return zeros(other.shape); }

    std::int64_t size() const;
    int rows() const { return shape.empty() ? 0 : shape[0]; }
    int cols() const { return shape.size() < 2 ? 1 : shape[1]; }

    double& at(int i) { return data[static_cast<std::size_t>(i)]; }
    double at(int i) const { return data[static_cast<std::size_t>(i)]; }
    double& at(int i, int j) { return data[static_cast<std::size_t>(i) * cols() + j]; }
    double at(int i, int j) const { return data[static_cast<std::size_t>(i) * cols() + j]; }

    void fill(double v) { std::fill(data.begin(), data.end(), v); }
    void add_scaled(const Tensor& other, double factor);  // this += factor * other

    bool same_shape(const Tensor& other) const { return shape == other.shape; }
    std::string shape_str() const;
};

}  // namespace paragraph
