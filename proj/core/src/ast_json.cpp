#include "paragraph/ast_json.hpp"

#include "paragraph/errors.hpp"

namespace paragraph {

using nlohmann::json;

std::string dump_json(const json& doc) { return doc.dump(2) + "\n"; }

json ast_to_json(const Ast& ast) {
    json nodes = json::array();
    for (const AstNode& n : ast.nodes) {
        json jn;
        jn["id"] = n.id;
        jn["kind"] = node_kind_name(n.kind);
        jn["children"] = n.children;
        if (!n.token_text.empty()) jn["text"] = n.token_text;
        if (n.decl_ref) jn["decl_ref"] = *n.decl_ref;
        if (n.directive_text) jn["directive"] = *n.directive_text;
        nodes.push_back(std::move(jn));
    }
    json doc;
    doc["schema_version"] = kAstSchemaVersion;
    doc["root"] = ast.root;
    doc["nodes"] = std::move(nodes);
    return doc;
}

Ast ast_from_json(const json& doc) {
    if (!doc.is_object() || !doc.contains("root") || !doc.contains("nodes"))
        throw SchemaError("AST document must have 'root' and 'nodes'");
    if (doc.value("schema_version", kAstSchemaVersion) != kAstSchemaVersion)
        throw SchemaError("unsupported AST schema_version");

    Ast ast;
    ast.root = doc["root"].get<NodeId>();
    const json& nodes = doc["nodes"];
    if (!nodes.is_array()) throw SchemaError("'nodes' must be an array");
    ast.nodes.resize(nodes.size());

    std::vector<int> parent_count(nodes.size(), 0);
    std::vector<bool> seen(nodes.size(), false);
    for (const json& jn : nodes) {
        if (!jn.contains("id") || !jn.contains("kind") || !jn.contains("children"))
            throw SchemaError("node requires 'id', 'kind', 'children'");
        NodeId id = jn["id"].get<NodeId>();
        if (id < 0 || static_cast<size_t>(id) >= ast.nodes.size())
            throw SchemaError("node id out of range: " + std::to_string(id));
        if (seen[static_cast<size_t>(id)]) throw SchemaError("duplicate node id: " + std::to_string(id));
        seen[static_cast<size_t>(id)] = true;
        AstNode& n = ast.nodes[static_cast<size_t>(id)];
        n.id = id;
        auto kind = node_kind_from_name(jn["kind"].get<std::string>());
        if (!kind) throw SchemaError("unknown node kind: " + jn["kind"].get<std::string>());
        n.kind = *kind;
        for (const json& c : jn["children"]) {
            NodeId cid = c.get<NodeId>();
            if (cid < 0 || static_cast<size_t>(cid) >= ast.nodes.size())
                throw SchemaError("child id out of range: " + std::to_string(cid));
            parent_count[static_cast<size_t>(cid)]++;
            n.children.push_back(cid);
        }
        n.token_text = jn.value("text", "");
        if (jn.contains("decl_ref")) n.decl_ref = jn["decl_ref"].get<NodeId>();
        if (jn.contains("directive")) n.directive_text = jn["directive"].get<std::string>();
    }

    if (ast.root < 0 || static_cast<size_t>(ast.root) >= ast.nodes.size())
        throw SchemaError("root id out of range");
    for (size_t i = 0; i < parent_count.size(); i++) {
        int expected = (static_cast<NodeId>(i) == ast.root) ? 0 : 1;
        if (parent_count[i] != expected)
            throw SchemaError("node " + std::to_string(i) + " has " +
                              std::to_string(parent_count[i]) + " parents; edges must form a tree");
    }
    ast.recompute_tokens();
    return ast;
}

}  // namespace paragraph
