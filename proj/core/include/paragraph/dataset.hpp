#pragma once

#include <array>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "paragraph/graph.hpp"
#include "paragraph/variant.hpp"

namespace paragraph {

inline constexpr int kDatasetSchemaVersion = 1;

struct DataPoint {
    ParaGraph graph;
    std::string app_name;
    VariantKind variant_kind = VariantKind::Cpu;
    double runtime_us = 0.0;  // > 0
    std::string platform_tag;
};

/// MinMax parameters for one scaled quantity. A degenerate fit
/// (max <= min) scales everything to 0.
struct MinMaxRange {
    double min = 0.0;
    double max = 0.0;

    double scale(double x) const {
        if (max <= min) return 0.0;
        double s = (x - min) / (max - min);
        return s < 0.0 ? 0.0 : (s > 1.0 ? 1.0 : s);  // clamp out-of-fit values
    }
    double unscale(double s) const { return max <= min ? min : min + s * (max - min); }

    bool operator==(const MinMaxRange&) const = default;
};

/// Fitted on training points only: Child-edge weights, the two side
/// features, and the runtime target.
struct MinMaxScaler {
    MinMaxRange weights;
    MinMaxRange teams;
    MinMaxRange threads;
    MinMaxRange target;

    bool operator==(const MinMaxScaler&) const = default;
};

struct Dataset {
    std::vector<DataPoint> points;
    MinMaxScaler scaler;
};

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
    std::uint64_t seed = 0;
};

/// Per-kind execution cost used by the synthetic labeler.
using CostTable = std::array<double, 19>;

CostTable default_cost_table();
CostTable unit_cost_table();

/// Deterministic analytic runtime in microseconds:
///   sum over Child edges of weight * cost(dst kind), divided by
///   sqrt(teams * threads), times exp(sigma * z) lognormal noise.
double synthetic_label(const ParaGraph& graph, std::uint64_t noise_seed, double sigma = 0.0,
                       const CostTable& costs = default_cost_table());

/// MinMax statistics over the points selected by `indices` (the training
/// side; leaving validation out of the fit).
MinMaxScaler fit_scaler(const std::vector<DataPoint>& points,
                        const std::vector<std::size_t>& indices);

/// Seeded uniform shuffle, first 90% train, last round(0.1*n) validation.
/// Throws DatasetError when fewer than 10 points.
Split split_dataset(std::size_t n_points, std::uint64_t seed);

// JSON-Lines dataset store, one DataPoint per line (docs/dataset-schema.md).
nlohmann::json data_point_to_json(const DataPoint& p);
DataPoint data_point_from_json(const nlohmann::json& doc);
void write_dataset_jsonl(const std::string& path, const std::vector<DataPoint>& points);
std::vector<DataPoint> read_dataset_jsonl(const std::string& path,
                                          const std::set<std::string>& exclude_apps = {});

}  // namespace paragraph
