#include "paragraph/graph_json.hpp"

#include <algorithm>
#include <tuple>

#include "paragraph/errors.hpp"

namespace paragraph {

using nlohmann::json;

json paragraph_to_json(const ParaGraph& g) {
    json nodes = json::array();
    for (const GraphNode& n : g.nodes) {
        json jn;
        jn["id"] = n.id;
        jn["kind"] = node_kind_name(n.kind);
        if (!n.text.empty()) jn["text"] = n.text;
        nodes.push_back(std::move(jn));
    }
    json edges = json::array();
    std::vector<Edge> sorted = g.edges;
    std::sort(sorted.begin(), sorted.end(), [](const Edge& a, const Edge& b) {
        return std::tie(a.src, a.dst, a.etype) < std::tie(b.src, b.dst, b.etype);
    });
    for (const Edge& e : sorted) {
        json je;
        je["src"] = e.src;
        je["dst"] = e.dst;
        je["type"] = static_cast<int>(e.etype);
        je["w"] = e.weight;
        edges.push_back(std::move(je));
    }
    json doc;
    doc["schema_version"] = kGraphSchemaVersion;
    doc["nodes"] = std::move(nodes);
    doc["edges"] = std::move(edges);
    doc["features"] = {{"teams", g.features.num_teams}, {"threads", g.features.num_threads}};
    return doc;
}

ParaGraph paragraph_from_json(const json& doc) {
    if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("edges") ||
        !doc.contains("features"))
        throw SchemaError("graph document must have 'nodes', 'edges', 'features'");
    if (doc.value("schema_version", kGraphSchemaVersion) != kGraphSchemaVersion)
        throw SchemaError("unsupported graph schema_version");

    ParaGraph g;
    g.nodes.resize(doc["nodes"].size());
    std::vector<bool> seen(g.nodes.size(), false);
    for (const json& jn : doc["nodes"]) {
        if (!jn.contains("id") || !jn.contains("kind")) throw SchemaError("graph node requires 'id' and 'kind'");
        NodeId id = jn["id"].get<NodeId>();
        if (id < 0 || static_cast<size_t>(id) >= g.nodes.size() || seen[static_cast<size_t>(id)])
            throw SchemaError("bad or duplicate node id: " + std::to_string(id));
        seen[static_cast<size_t>(id)] = true;
        auto kind = node_kind_from_name(jn["kind"].get<std::string>());
        if (!kind) throw SchemaError("unknown node kind: " + jn["kind"].get<std::string>());
        g.nodes[static_cast<size_t>(id)] = {id, *kind, jn.value("text", "")};
    }

    for (const json& je : doc["edges"]) {
        if (!je.contains("src") || !je.contains("dst") || !je.contains("type") || !je.contains("w"))
            throw SchemaError("graph edge requires 'src', 'dst', 'type', 'w'");
        Edge e;
        e.src = je["src"].get<NodeId>();
        e.dst = je["dst"].get<NodeId>();
        int t = je["type"].get<int>();
        if (t < 0 || t >= kNumEdgeTypes) throw SchemaError("edge type out of range: " + std::to_string(t));
        e.etype = static_cast<EdgeType>(t);
        e.weight = je["w"].get<double>();
        auto valid = [&](NodeId id) { return id >= 0 && static_cast<size_t>(id) < g.nodes.size(); };
        if (!valid(e.src) || !valid(e.dst)) throw SchemaError("edge endpoint out of range");
        if (e.etype == EdgeType::Child && e.weight <= 0.0)
            throw SchemaError("Child edge weight must be positive");
        if (e.etype != EdgeType::Child && e.weight != 0.0)
            throw SchemaError("non-Child edge weight must be zero");
        g.edges.push_back(e);
    }
    std::sort(g.edges.begin(), g.edges.end(), [](const Edge& a, const Edge& b) {
        return std::tie(a.src, a.dst, a.etype) < std::tie(b.src, b.dst, b.etype);
    });

    const json& f = doc["features"];
    if (!f.contains("teams") || !f.contains("threads"))
        throw SchemaError("features require 'teams' and 'threads'");
    g.features.num_teams = f["teams"].get<long long>();
    g.features.num_threads = f["threads"].get<long long>();
    if (g.features.num_teams < 1 || g.features.num_threads < 1)
        throw SchemaError("teams and threads must be positive");
    return g;
}

}  // namespace paragraph
