#include "paragraph/ast.hpp"

#include <array>
#include <utility>

namespace paragraph {

namespace {

constexpr std::array<std::pair<NodeKind, const char*>, 19> kKindNames = {{
    {NodeKind::TranslationUnit, "TranslationUnit"},
    {NodeKind::FunctionDecl, "FunctionDecl"},
    {NodeKind::ParmVarDecl, "ParmVarDecl"},
    {NodeKind::CompoundStmt, "CompoundStmt"},
    {NodeKind::DeclStmt, "DeclStmt"},
    {NodeKind::VarDecl, "VarDecl"},
    {NodeKind::BinaryOperator, "BinaryOperator"},
    {NodeKind::UnaryOperator, "UnaryOperator"},
    {NodeKind::ImplicitCastExpr, "ImplicitCastExpr"},
    {NodeKind::IntegerLiteral, "IntegerLiteral"},
    {NodeKind::FloatingLiteral, "FloatingLiteral"},
    {NodeKind::DeclRefExpr, "DeclRefExpr"},
    {NodeKind::ArraySubscriptExpr, "ArraySubscriptExpr"},
    {NodeKind::CallExpr, "CallExpr"},
    {NodeKind::ForStmt, "ForStmt"},
    {NodeKind::WhileStmt, "WhileStmt"},
    {NodeKind::IfStmt, "IfStmt"},
    {NodeKind::ReturnStmt, "ReturnStmt"},
    {NodeKind::OmpDirective, "OmpDirective"},
}};

}  // namespace

const char* node_kind_name(NodeKind k) {
    for (const auto& [kind, name] : kKindNames)
        if (kind == k) return name;
    return "?";
}

std::optional<NodeKind> node_kind_from_name(const std::string& name) {
    for (const auto& [kind, kname] : kKindNames)
        if (name == kname) return kind;
    return std::nullopt;
}

void Ast::recompute_tokens() {
    tokens.clear();
    // Iterative DFS; children pushed in reverse visit order.
    std::vector<NodeId> stack{root};
    while (!stack.empty()) {
        NodeId id = stack.back();
        stack.pop_back();
        const AstNode& n = node(id);
        if (n.is_terminal()) {
            tokens.push_back(id);
            continue;
        }
        std::vector<NodeId> visit = n.children;
        if (n.kind == NodeKind::ForStmt && visit.size() == 4)
            std::swap(visit[2], visit[3]);  // stored (init,cond,body,inc); text order puts inc first
        for (auto it = visit.rbegin(); it != visit.rend(); ++it) stack.push_back(*it);
    }
}

bool Ast::structurally_equal(const Ast& other) const {
    if (root != other.root || nodes.size() != other.nodes.size()) return false;
    for (size_t i = 0; i < nodes.size(); i++) {
        const AstNode& a = nodes[i];
        const AstNode& b = other.nodes[i];
        if (a.id != b.id || a.kind != b.kind || a.children != b.children ||
            a.token_text != b.token_text || a.decl_ref != b.decl_ref ||
            a.directive_text != b.directive_text)
            return false;
    }
    return true;
}

}  // namespace paragraph
