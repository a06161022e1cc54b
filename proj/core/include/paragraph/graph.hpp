#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "paragraph/ast.hpp"

namespace paragraph {

// Stable wire encoding (0..7); do not reorder.
enum class EdgeType : int {
    Child = 0,
    NextToken = 1,
    NextSib = 2,
    Ref = 3,
    ForExec = 4,
    ForNext = 5,
    ConTrue = 6,
    ConFalse = 7,
};

inline constexpr int kNumEdgeTypes = 8;

const char* edge_type_name(EdgeType t);

struct Edge {
    NodeId src = 0;
    NodeId dst = 0;
    EdgeType etype = EdgeType::Child;
    double weight = 0.0;  // > 0 iff etype == Child

    bool operator==(const Edge&) const = default;
};

struct GraphNode {
    NodeId id = 0;
    NodeKind kind = NodeKind::TranslationUnit;
    std::string text;  // token text; directive text for OmpDirective nodes

    bool operator==(const GraphNode&) const = default;
};

struct GraphFeatures {
    long long num_teams = 1;
    long long num_threads = 1;

    bool operator==(const GraphFeatures&) const = default;
};

/// Weighted typed multigraph over the AST's nodes: Child edges carry the
/// tree plus execution-count weights, the other seven types carry control
/// and data flow with weight 0. Edges are kept sorted by (src, dst, type).
struct ParaGraph {
    std::vector<GraphNode> nodes;  // indexed by id
    std::vector<Edge> edges;
    GraphFeatures features;

    bool operator==(const ParaGraph&) const = default;
};

enum class GraphMode { RawAst, AugmentedAst, Paragraph };

const char* graph_mode_name(GraphMode m);
std::optional<GraphMode> graph_mode_from_name(const std::string& name);

/// Values for symbolic loop bounds plus the fallback trip count for loops
/// whose bounds cannot be resolved.
struct ParamBindings {
    std::map<std::string, long long> values;
    long long default_trip = 10;
};

}  // namespace paragraph
