#include "paragraph/dataset.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include "paragraph/errors.hpp"
#include "paragraph/graph_json.hpp"
#include "paragraph/rng.hpp"

namespace paragraph {

CostTable default_cost_table() {
    CostTable t;
    t.fill(1.0);
    auto set = [&](NodeKind k, double c) { t[static_cast<std::size_t>(k)] = c; };
    set(NodeKind::BinaryOperator, 2.0);
    set(NodeKind::UnaryOperator, 1.5);
    set(NodeKind::ArraySubscriptExpr, 3.0);
    set(NodeKind::CallExpr, 8.0);
    set(NodeKind::ForStmt, 2.0);
    set(NodeKind::WhileStmt, 2.0);
    set(NodeKind::IfStmt, 2.0);
    return t;
}

CostTable unit_cost_table() {
    CostTable t;
    t.fill(1.0);
    return t;
}

double synthetic_label(const ParaGraph& graph, std::uint64_t noise_seed, double sigma,
                       const CostTable& costs) {
    double base = 0.0;
    for (const Edge& e : graph.edges) {
        if (e.etype != EdgeType::Child) continue;
        base += e.weight * costs[static_cast<std::size_t>(graph.nodes[static_cast<std::size_t>(e.dst)].kind)];
    }
    double denom = std::sqrt(static_cast<double>(graph.features.num_teams) *
                             static_cast<double>(graph.features.num_threads));
    double label = base / denom;
    if (sigma > 0.0) {
        Rng rng(noise_seed);
        label *= std::exp(sigma * rng.next_normal());
    }
    return label;
}

MinMaxScaler fit_scaler(const std::vector<DataPoint>& points,
                        const std::vector<std::size_t>& indices) {
    MinMaxScaler s;
    bool first_w = true, first_p = true;
    for (std::size_t idx : indices) {
        const DataPoint& p = points.at(idx);
        for (const Edge& e : p.graph.edges) {
            if (e.etype != EdgeType::Child) continue;
            if (first_w) {
                s.weights = {e.weight, e.weight};
                first_w = false;
            } else {
                s.weights.min = std::min(s.weights.min, e.weight);
                s.weights.max = std::max(s.weights.max, e.weight);
            }
        }
        double g = static_cast<double>(p.graph.features.num_teams);
        double t = static_cast<double>(p.graph.features.num_threads);
        if (first_p) {
            s.teams = {g, g};
            s.threads = {t, t};
            s.target = {p.runtime_us, p.runtime_us};
            first_p = false;
        } else {
            s.teams.min = std::min(s.teams.min, g);
            s.teams.max = std::max(s.teams.max, g);
            s.threads.min = std::min(s.threads.min, t);
            s.threads.max = std::max(s.threads.max, t);
            s.target.min = std::min(s.target.min, p.runtime_us);
            s.target.max = std::max(s.target.max, p.runtime_us);
        }
    }
    return s;
}

Split split_dataset(std::size_t n_points, std::uint64_t seed) {
    if (n_points < 10)
        throw DatasetError("need at least 10 points to split 9:1, got " + std::to_string(n_points));
    std::vector<std::size_t> order(n_points);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(order);
    auto n_val = static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(n_points)));
    std::size_t n_train = n_points - n_val;
    Split split;
    split.seed = seed;
    split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.val.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    return split;
}

nlohmann::json data_point_to_json(const DataPoint& p) {
    return {{"schema_version", kDatasetSchemaVersion},
            {"app", p.app_name},
            {"kind", variant_kind_name(p.variant_kind)},
            {"platform", p.platform_tag},
            {"runtime_us", p.runtime_us},
            {"graph", paragraph_to_json(p.graph)}};
}

DataPoint data_point_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("app") || !doc.contains("runtime_us") ||
        !doc.contains("graph"))
        throw SchemaError("data point requires 'app', 'runtime_us', 'graph'");
    DataPoint p;
    p.app_name = doc["app"].get<std::string>();
    auto kind = variant_kind_from_name(doc.value("kind", "cpu"));
    if (!kind) throw SchemaError("unknown variant kind: " + doc.value("kind", ""));
    p.variant_kind = *kind;
    p.platform_tag = doc.value("platform", "");
    p.runtime_us = doc["runtime_us"].get<double>();
    if (!(p.runtime_us > 0.0)) throw SchemaError("runtime_us must be positive");
    p.graph = paragraph_from_json(doc["graph"]);
    return p;
}

void write_dataset_jsonl(const std::string& path, const std::vector<DataPoint>& points) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DatasetError("cannot open for writing: " + path);
    for (const DataPoint& p : points) out << data_point_to_json(p).dump() << "\n";
    if (!out) throw DatasetError("write failed: " + path);
}

std::vector<DataPoint> read_dataset_jsonl(const std::string& path,
                                          const std::set<std::string>& exclude_apps) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DatasetError("cannot open dataset: " + path);
    std::vector<DataPoint> points;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        if (line.empty()) continue;
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw SchemaError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        DataPoint p = data_point_from_json(doc);
        if (exclude_apps.count(p.app_name)) continue;
        points.push_back(std::move(p));
    }
    return points;
}

}  // namespace paragraph
