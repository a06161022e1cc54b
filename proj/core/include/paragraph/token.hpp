#pragma once

#include <string>
#include <vector>

namespace paragraph {

enum class TokenKind {
    Keyword,
    Identifier,
    IntegerLiteral,
    FloatLiteral,
    Punctuator,
    PragmaLine,  // one token per "#pragma omp ..." logical line
};

const char* token_kind_name(TokenKind k);

struct Token {
    TokenKind kind;
    std::string text;
    int line = 1;    // 1-based
    int column = 1;  // 1-based
};

/// Lexes a C-subset source string. "#pragma omp" lines (with backslash
/// continuations) become single PragmaLine tokens; comments are discarded.
/// Throws LexError on an unrecognized character.
std::vector<Token> tokenize(const std::string& source);

}  // namespace paragraph
