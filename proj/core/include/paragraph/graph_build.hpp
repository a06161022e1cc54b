#pragma once

#include <functional>
#include <map>
#include <vector>

#include "paragraph/ast.hpp"
#include "paragraph/graph.hpp"
#include "paragraph/rational.hpp"

namespace paragraph {

// Each augmentation pass returns only its own edges (weight 0).
std::vector<Edge> add_next_token_edges(const Ast& ast);
std::vector<Edge> add_next_sib_edges(const Ast& ast);
std::vector<Edge> add_ref_edges(const Ast& ast);
std::vector<Edge> add_for_edges(const Ast& ast);
std::vector<Edge> add_if_edges(const Ast& ast);

using DiagnosticSink = std::function<void(const std::string&)>;

/// Iteration estimate for a ForStmt/WhileStmt. Canonical loops
/// "for (i = a; i < b; i += s)" with constant or bound symbols evaluate to
/// ceil((b-a)/s); anything else falls back to bindings.default_trip and
/// reports a diagnostic. The result is clamped to >= 1 so weights stay
/// positive.
Rational trip_count(const Ast& ast, NodeId for_node, const ParamBindings& bindings,
                    const DiagnosticSink& diag = nullptr);

/// Execution-count weights for every Child edge, keyed by (parent, child).
///
/// Top-down multiplicative context w, starting at 1:
///   - a Child edge gets its parent's context;
///   - a ForStmt with trip n: the init edge keeps w; cond/inc/body edges
///     and the body context get w*n', where n' = n/num_threads when the
///     loop is the one parallelized by an enclosing statically scheduled
///     OmpDirective, else n' = n;
///   - collapse(2) divides the collapsed iteration space once: the outer
///     loop takes n_outer/num_threads and the inner loop keeps n_inner;
///   - an IfStmt passes w to its condition and w/2 into each branch;
///   - num_teams never enters the computation.
std::map<std::pair<NodeId, NodeId>, Rational> assign_weights(const Ast& ast,
                                                             const ParamBindings& bindings,
                                                             long long num_threads,
                                                             const DiagnosticSink& diag = nullptr);

/// Assembles the full graph for one of the three ablation modes:
/// raw_ast = Child edges only, unit weights; augmented_ast = all 8 edge
/// types, unit Child weights; paragraph = all 8 edge types with computed
/// weights.
ParaGraph build_paragraph(const Ast& ast, const ParamBindings& bindings, long long num_teams,
                          long long num_threads, GraphMode mode,
                          const DiagnosticSink& diag = nullptr);

}  // namespace paragraph
