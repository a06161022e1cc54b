#pragma once

#include <string>

#include <json.hpp>

#include "paragraph/ast.hpp"

namespace paragraph {

inline constexpr int kAstSchemaVersion = 1;

/// Deterministic AST serialization (see docs/ast-schema.md).
nlohmann::json ast_to_json(const Ast& ast);

/// Inverse of ast_to_json; validates ids, tree shape, and kinds.
/// Throws SchemaError on malformed input.
Ast ast_from_json(const nlohmann::json& doc);

/// Canonical on-disk rendering (2-space indent, trailing newline).
std::string dump_json(const nlohmann::json& doc);

}  // namespace paragraph
