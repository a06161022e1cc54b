#pragma once

#include <map>
#include <string>

#include "paragraph/ast.hpp"
#include "paragraph/graph.hpp"

namespace paragraph::testing {

/// Independent oracle for Child-edge weights: runs the program with a
/// tree-walking interpreter and counts how many times each node
/// executes. Loop conditions and increments are counted once per
/// completed iteration (matching the weight model's n-per-loop
/// convention); everything else is counted exactly as executed.
///
/// Supports the oracle's program class: integer scalars, arithmetic,
/// assignments, canonical for loops. Throws std::runtime_error on
/// IfStmt/WhileStmt (the oracle is defined for branch-free programs).
std::map<NodeId, long long> count_executions(const Ast& ast);

/// Checks every Child edge's weight against the interpreter count of its
/// destination. Returns true when all match exactly; otherwise fills
/// `mismatch` with a description of the first failure.
bool weights_match_execution(const Ast& ast, const ParaGraph& graph, std::string* mismatch);

}  // namespace paragraph::testing
