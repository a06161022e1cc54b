#pragma once

#include <string>
#include <vector>

#include "paragraph/ast.hpp"
#include "paragraph/token.hpp"

namespace paragraph {

/// Parses a token stream into an Ast with Clang-style node kinds.
/// Node ids are assigned in pre-order (root == 0). Variable references
/// resolve to their declarations or parsing fails with UnresolvedRefError.
Ast parse(const std::vector<Token>& tokens);

/// tokenize + parse.
Ast parse_source(const std::string& source);

}  // namespace paragraph
