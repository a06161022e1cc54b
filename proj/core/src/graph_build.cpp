#include "paragraph/graph_build.hpp"

#include <algorithm>
#include <optional>
#include <tuple>

#include "paragraph/errors.hpp"
#include "paragraph/omp.hpp"

namespace paragraph {

const char* edge_type_name(EdgeType t) {
    switch (t) {
        case EdgeType::Child: return "Child";
        case EdgeType::NextToken: return "NextToken";
        case EdgeType::NextSib: return "NextSib";
        case EdgeType::Ref: return "Ref";
        case EdgeType::ForExec: return "ForExec";
        case EdgeType::ForNext: return "ForNext";
        case EdgeType::ConTrue: return "ConTrue";
        case EdgeType::ConFalse: return "ConFalse";
    }
    return "?";
}

const char* graph_mode_name(GraphMode m) {
    switch (m) {
        case GraphMode::RawAst: return "raw_ast";
        case GraphMode::AugmentedAst: return "augmented_ast";
        case GraphMode::Paragraph: return "paragraph";
    }
    return "?";
}

std::optional<GraphMode> graph_mode_from_name(const std::string& name) {
    if (name == "raw_ast" || name == "raw") return GraphMode::RawAst;
    if (name == "augmented_ast" || name == "aug") return GraphMode::AugmentedAst;
    if (name == "paragraph" || name == "para") return GraphMode::Paragraph;
    return std::nullopt;
}

std::vector<Edge> add_next_token_edges(const Ast& ast) {
    std::vector<Edge> edges;
    for (size_t i = 0; i + 1 < ast.tokens.size(); i++)
        edges.push_back({ast.tokens[i], ast.tokens[i + 1], EdgeType::NextToken, 0.0});
    return edges;
}

std::vector<Edge> add_next_sib_edges(const Ast& ast) {
    std::vector<Edge> edges;
    for (const AstNode& n : ast.nodes)
        for (size_t i = 0; i + 1 < n.children.size(); i++)
            edges.push_back({n.children[i], n.children[i + 1], EdgeType::NextSib, 0.0});
    return edges;
}

std::vector<Edge> add_ref_edges(const Ast& ast) {
    std::vector<Edge> edges;
    for (const AstNode& n : ast.nodes)
        if (n.kind == NodeKind::DeclRefExpr && n.decl_ref)
            edges.push_back({n.id, *n.decl_ref, EdgeType::Ref, 0.0});
    return edges;
}

std::vector<Edge> add_for_edges(const Ast& ast) {
    std::vector<Edge> edges;
    for (const AstNode& n : ast.nodes) {
        if (n.kind == NodeKind::ForStmt && n.children.size() == 4) {
            NodeId init = n.children[0], cond = n.children[1], body = n.children[2],
                   inc = n.children[3];
            edges.push_back({init, cond, EdgeType::ForExec, 0.0});
            edges.push_back({cond, body, EdgeType::ForExec, 0.0});
            edges.push_back({body, inc, EdgeType::ForNext, 0.0});
            edges.push_back({inc, cond, EdgeType::ForNext, 0.0});
        } else if (n.kind == NodeKind::WhileStmt && n.children.size() == 2) {
            // minimal extension of the ForStmt scheme over (cond, body)
            edges.push_back({n.children[0], n.children[1], EdgeType::ForExec, 0.0});
            edges.push_back({n.children[1], n.children[0], EdgeType::ForNext, 0.0});
        }
    }
    return edges;
}

std::vector<Edge> add_if_edges(const Ast& ast) {
    std::vector<Edge> edges;
    for (const AstNode& n : ast.nodes) {
        if (n.kind != NodeKind::IfStmt) continue;
        edges.push_back({n.children[0], n.children[1], EdgeType::ConTrue, 0.0});
        if (n.children.size() == 3)
            edges.push_back({n.children[0], n.children[2], EdgeType::ConFalse, 0.0});
    }
    return edges;
}

namespace {

NodeId unwrap_cast(const Ast& ast, NodeId id) {
    const AstNode& n = ast.node(id);
    if (n.kind == NodeKind::ImplicitCastExpr && n.children.size() == 1) return n.children[0];
    return id;
}

// Constant or bound-symbol evaluation for loop bounds.
std::optional<long long> eval_bound(const Ast& ast, NodeId id, const ParamBindings& bindings,
                                    std::string* missing) {
    const AstNode& n = ast.node(unwrap_cast(ast, id));
    if (n.kind == NodeKind::IntegerLiteral) return std::stoll(n.token_text);
    if (n.kind == NodeKind::DeclRefExpr) {
        auto it = bindings.values.find(n.token_text);
        if (it != bindings.values.end()) return it->second;
        if (missing) *missing = n.token_text;
        return std::nullopt;
    }
    return std::nullopt;
}

std::optional<std::string> induction_var_of_init(const Ast& ast, NodeId init) {
    const AstNode& n = ast.node(init);
    if (n.kind == NodeKind::DeclStmt && n.children.size() == 1) {
        const AstNode& var = ast.node(n.children[0]);
        if (var.kind == NodeKind::VarDecl && var.children.size() == 1) return var.token_text;
        return std::nullopt;
    }
    if (n.kind == NodeKind::BinaryOperator && n.token_text == "=" && n.children.size() == 2) {
        const AstNode& lhs = ast.node(unwrap_cast(ast, n.children[0]));
        if (lhs.kind == NodeKind::DeclRefExpr) return lhs.token_text;
    }
    return std::nullopt;
}

std::optional<long long> init_value(const Ast& ast, NodeId init, const ParamBindings& bindings,
                                    std::string* missing) {
    const AstNode& n = ast.node(init);
    if (n.kind == NodeKind::DeclStmt && n.children.size() == 1) {
        const AstNode& var = ast.node(n.children[0]);
        if (var.children.size() == 1) return eval_bound(ast, var.children[0], bindings, missing);
        return std::nullopt;
    }
    if (n.kind == NodeKind::BinaryOperator && n.children.size() == 2)
        return eval_bound(ast, n.children[1], bindings, missing);
    return std::nullopt;
}

bool refers_to(const Ast& ast, NodeId id, const std::string& name) {
    const AstNode& n = ast.node(unwrap_cast(ast, id));
    return n.kind == NodeKind::DeclRefExpr && n.token_text == name;
}

void emit_diag(const DiagnosticSink& diag, const std::string& msg) {
    if (diag) diag(msg);
}

}  // namespace

Rational trip_count(const Ast& ast, NodeId for_node, const ParamBindings& bindings,
                    const DiagnosticSink& diag) {
    const AstNode& loop = ast.node(for_node);
    if (loop.kind == NodeKind::WhileStmt) return Rational(bindings.default_trip);
    if (loop.kind != NodeKind::ForStmt || loop.children.size() != 4)
        return Rational(bindings.default_trip);

    NodeId init = loop.children[0], cond = loop.children[1], inc = loop.children[3];
    std::string missing;

    auto fallback = [&](const std::string& why) {
        emit_diag(diag, "loop at " + to_string(loop.loc) + ": " + why + "; using default trip " +
                            std::to_string(bindings.default_trip));
        return Rational(bindings.default_trip);
    };

    auto var = induction_var_of_init(ast, init);
    if (!var) return fallback("non-canonical init");
    auto a = init_value(ast, init, bindings, &missing);
    if (!a) return fallback(missing.empty() ? "non-constant init" : "unbound symbol '" + missing + "'");

    const AstNode& cond_node = ast.node(cond);
    if (cond_node.kind != NodeKind::BinaryOperator || cond_node.token_text != "<" ||
        !refers_to(ast, cond_node.children[0], *var))
        return fallback("non-canonical condition");
    auto b = eval_bound(ast, cond_node.children[1], bindings, &missing);
    if (!b) return fallback(missing.empty() ? "non-constant bound" : "unbound symbol '" + missing + "'");

    long long step = 0;
    const AstNode& inc_node = ast.node(inc);
    if (inc_node.kind == NodeKind::UnaryOperator && inc_node.token_text == "++" &&
        refers_to(ast, inc_node.children[0], *var)) {
        step = 1;
    } else if (inc_node.kind == NodeKind::BinaryOperator && inc_node.token_text == "+=" &&
               refers_to(ast, inc_node.children[0], *var)) {
        auto s = eval_bound(ast, inc_node.children[1], bindings, &missing);
        if (!s || *s <= 0)
            return fallback(missing.empty() ? "non-constant step" : "unbound symbol '" + missing + "'");
        step = *s;
    } else {
        return fallback("non-canonical increment");
    }

    long long span = *b - *a;
    if (span <= 0) return fallback("empty iteration space");
    return Rational((span + step - 1) / step);
}

namespace {

class WeightWalker {
public:
    WeightWalker(const Ast& ast, const ParamBindings& bindings, long long num_threads,
                 const DiagnosticSink& diag)
        : ast_(ast), bindings_(bindings), threads_(num_threads), diag_(diag) {}

    std::map<std::pair<NodeId, NodeId>, Rational> run() {
        walk(ast_.root, Rational(1), /*parallel_divisor=*/1);
        return std::move(weights_);
    }

private:
    void set_edge(NodeId parent, NodeId child, const Rational& w) {
        weights_[{parent, child}] = w;
    }

    // `divisor` applies to this node when it is the loop annotated by an
    // enclosing statically scheduled parallel-for directive.
    void walk(NodeId id, Rational w, long long divisor) {
        const AstNode& n = ast_.node(id);
        switch (n.kind) {
            case NodeKind::ForStmt: {
                Rational n_eff = trip_count(ast_, id, bindings_, diag_) / Rational(divisor);
                Rational inner = w * n_eff;
                set_edge(id, n.children[0], w);
                walk(n.children[0], w, 1);
                for (size_t i = 1; i < 4; i++) {
                    set_edge(id, n.children[i], inner);
                    walk(n.children[i], inner, 1);
                }
                return;
            }
            case NodeKind::WhileStmt: {
                Rational inner = w * trip_count(ast_, id, bindings_, diag_);
                for (NodeId c : n.children) {
                    set_edge(id, c, inner);
                    walk(c, inner, 1);
                }
                return;
            }
            case NodeKind::IfStmt: {
                set_edge(id, n.children[0], w);
                walk(n.children[0], w, 1);
                Rational half = w / Rational(2);
                for (size_t i = 1; i < n.children.size(); i++) {
                    set_edge(id, n.children[i], half);
                    walk(n.children[i], half, 1);
                }
                return;
            }
            case NodeKind::OmpDirective: {
                NodeId stmt = n.children.at(0);
                set_edge(id, stmt, w);
                long long div = 1;
                OmpDirectiveInfo info = parse_omp_directive(n.directive_text.value_or(""));
                if (info.parallelizes_loop() && info.static_schedule() &&
                    ast_.node(stmt).kind == NodeKind::ForStmt)
                    div = threads_;
                walk(stmt, w, div);
                return;
            }
            default: {
                for (NodeId c : n.children) {
                    set_edge(id, c, w);
                    walk(c, w, 1);
                }
                return;
            }
        }
    }

    const Ast& ast_;
    const ParamBindings& bindings_;
    long long threads_;
    const DiagnosticSink& diag_;
    std::map<std::pair<NodeId, NodeId>, Rational> weights_;
};

}  // namespace

std::map<std::pair<NodeId, NodeId>, Rational> assign_weights(const Ast& ast,
                                                             const ParamBindings& bindings,
                                                             long long num_threads,
                                                             const DiagnosticSink& diag) {
    if (num_threads < 1) throw WeightError("num_threads must be >= 1");
    return WeightWalker(ast, bindings, num_threads, diag).run();
}

ParaGraph build_paragraph(const Ast& ast, const ParamBindings& bindings, long long num_teams,
                          long long num_threads, GraphMode mode, const DiagnosticSink& diag) {
    if (num_teams < 1) throw WeightError("num_teams must be >= 1");
    if (num_threads < 1) throw WeightError("num_threads must be >= 1");

    ParaGraph g;
    g.features = {num_teams, num_threads};
    g.nodes.reserve(ast.nodes.size());
    for (const AstNode& n : ast.nodes) {
        std::string text = n.token_text;
        if (n.kind == NodeKind::OmpDirective && n.directive_text) text = *n.directive_text;
        g.nodes.push_back({n.id, n.kind, text});
    }

    std::map<std::pair<NodeId, NodeId>, Rational> weights;
    if (mode == GraphMode::Paragraph) weights = assign_weights(ast, bindings, num_threads, diag);

    for (const AstNode& n : ast.nodes) {
        for (NodeId c : n.children) {
            double w = 1.0;
            if (mode == GraphMode::Paragraph) w = weights.at({n.id, c}).to_double();
            g.edges.push_back({n.id, c, EdgeType::Child, w});
        }
    }
    if (mode != GraphMode::RawAst) {
        for (auto pass : {add_next_token_edges, add_next_sib_edges, add_ref_edges, add_for_edges,
                          add_if_edges}) {
            auto extra = pass(ast);
            g.edges.insert(g.edges.end(), extra.begin(), extra.end());
        }
    }
    std::sort(g.edges.begin(), g.edges.end(), [](const Edge& a, const Edge& b) {
        return std::tie(a.src, a.dst, a.etype) < std::tie(b.src, b.dst, b.etype);
    });
    return g;
}

}  // namespace paragraph
