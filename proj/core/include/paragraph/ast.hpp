#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "paragraph/errors.hpp"

namespace paragraph {

using NodeId = int;

// Clang-style node kinds. The loop-increment node is Clang's UnaryOperator
// (elsewhere sometimes drawn as "UnaryStmt" — same node).
enum class NodeKind {
    TranslationUnit,
    FunctionDecl,
    ParmVarDecl,
    CompoundStmt,
    DeclStmt,
    VarDecl,
    BinaryOperator,
    UnaryOperator,
    ImplicitCastExpr,
    IntegerLiteral,
    FloatingLiteral,
    DeclRefExpr,
    ArraySubscriptExpr,
    CallExpr,
    ForStmt,
    WhileStmt,
    IfStmt,
    ReturnStmt,
    OmpDirective,
};

const char* node_kind_name(NodeKind k);
std::optional<NodeKind> node_kind_from_name(const std::string& name);

struct AstNode {
    NodeId id = 0;
    NodeKind kind = NodeKind::TranslationUnit;
    std::vector<NodeId> children;            // source order left-to-right
    std::string token_text;                  // nonempty only for terminals
    std::optional<NodeId> decl_ref;          // DeclRefExpr -> VarDecl/ParmVarDecl
    std::optional<std::string> directive_text;  // OmpDirective only
    SourceLocation loc;                      // diagnostics only, not serialized

    bool is_terminal() const { return children.empty(); }
};

struct Ast {
    std::vector<AstNode> nodes;  // indexed by id (pre-order: root == 0)
    NodeId root = 0;
    std::vector<NodeId> tokens;  // terminal node ids in source order

    const AstNode& node(NodeId id) const { return nodes.at(static_cast<size_t>(id)); }
    AstNode& node(NodeId id) { return nodes.at(static_cast<size_t>(id)); }

    /// Rebuilds `tokens` from the tree. Source order is pre-order except
    /// that a ForStmt is visited (init, cond, inc, body): the increment
    /// appears before the body in the program text even though it is
    /// stored as the last child.
    void recompute_tokens();

    /// Structural equality over (root, kind, children, token_text,
    /// decl_ref, directive_text); source locations are ignored.
    bool structurally_equal(const Ast& other) const;
};

}  // namespace paragraph
