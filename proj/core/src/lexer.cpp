#include "paragraph/token.hpp"

#include <array>
#include <cctype>

#include "paragraph/errors.hpp"

namespace paragraph {

const char* token_kind_name(TokenKind k) {
    switch (k) {
        case TokenKind::Keyword: return "keyword";
        case TokenKind::Identifier: return "identifier";
        case TokenKind::IntegerLiteral: return "integer-literal";
        case TokenKind::FloatLiteral: return "float-literal";
        case TokenKind::Punctuator: return "punctuator";
        case TokenKind::PragmaLine: return "pragma-line";
    }
    return "?";
}

namespace {

bool is_keyword(const std::string& s) {
    static const std::array<const char*, 9> kw = {
        "int", "float", "double", "void", "for", "while", "if", "else", "return"};
    for (const char* k : kw)
        if (s == k) return true;
    return false;
}

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (!eof()) {
            skip_space_and_comments();
            if (eof()) break;
            int line = line_, col = col_;
            char c = peek();
            if (c == '#') {
                out.push_back(lex_pragma(line, col));
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::string text = lex_ident();
                out.push_back({is_keyword(text) ? TokenKind::Keyword : TokenKind::Identifier,
                               text, line, col});
            } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                       (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
                out.push_back(lex_number(line, col));
            } else {
                out.push_back(lex_punct(line, col));
            }
        }
        return out;
    }

private:
    bool eof(size_t ahead = 0) const { return pos_ + ahead >= src_.size(); }
    char peek(size_t ahead = 0) const { return eof(ahead) ? '\0' : src_[pos_ + ahead]; }

    char advance() {
        char c = src_[pos_++];
        if (c == '\n') {
            line_++;
            col_ = 1;
        } else {
            col_++;
        }
        return c;
    }

    void skip_space_and_comments() {
        for (;;) {
            if (eof()) return;
            char c = peek();
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (!eof() && peek() != '\n') advance();
            } else if (c == '/' && peek(1) == '*') {
                SourceLocation open{line_, col_};
                advance();
                advance();
                while (!(peek() == '*' && peek(1) == '/')) {
                    if (eof()) throw LexError(open, "unterminated block comment");
                    advance();
                }
                advance();
                advance();
            } else {
                return;
            }
        }
    }

    std::string lex_ident() {
        std::string s;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
            s += advance();
        return s;
    }

    Token lex_number(int line, int col) {
        std::string s;
        bool is_float = false;
        while (std::isdigit(static_cast<unsigned char>(peek()))) s += advance();
        if (peek() == '.') {
            is_float = true;
            s += advance();
            while (std::isdigit(static_cast<unsigned char>(peek()))) s += advance();
        }
        if (peek() == 'e' || peek() == 'E') {
            size_t ahead = (peek(1) == '+' || peek(1) == '-') ? 2 : 1;
            if (std::isdigit(static_cast<unsigned char>(peek(ahead)))) {
                is_float = true;
                s += advance();
                if (peek() == '+' || peek() == '-') s += advance();
                while (std::isdigit(static_cast<unsigned char>(peek()))) s += advance();
            }
        }
        if (peek() == 'f' || peek() == 'F') {
            is_float = true;
            s += advance();
        }
        return {is_float ? TokenKind::FloatLiteral : TokenKind::IntegerLiteral, s, line, col};
    }

    // A "#pragma omp ..." line becomes one token covering the full logical
    // line; backslash-newline continuations are folded into a single space.
    Token lex_pragma(int line, int col) {
        std::string s;
        while (!eof() && peek() != '\n') {
            if (peek() == '\\' && (peek(1) == '\n' || (peek(1) == '\r' && peek(2) == '\n'))) {
                advance();
                while (!eof() && peek() != '\n') advance();
                if (!eof()) advance();
                s += ' ';
                continue;
            }
            if (peek() == '\r') {
                advance();
                continue;
            }
            s += advance();
        }
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
        if (s.rfind("#pragma omp", 0) != 0)
            throw LexError({line, col}, "unsupported preprocessor line (only '#pragma omp' is recognized): " + s);
        return {TokenKind::PragmaLine, s, line, col};
    }

    Token lex_punct(int line, int col) {
        static const std::array<const char*, 13> two = {"<=", ">=", "==", "!=", "&&", "||",
                                                        "++", "--", "+=", "-=", "*=", "/=", "%="};
        char c = peek();
        char n = peek(1);
        std::string pair{c, n};
        for (const char* p : two) {
            if (pair == p) {
                advance();
                advance();
                return {TokenKind::Punctuator, pair, line, col};
            }
        }
        static const std::string single = "()[]{};,=+-*/%<>!";
        if (single.find(c) != std::string::npos) {
            advance();
            return {TokenKind::Punctuator, std::string(1, c), line, col};
        }
        throw LexError({line, col}, std::string("unrecognized character '") + c + "'");
    }

    const std::string& src_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

}  // namespace

std::vector<Token> tokenize(const std::string& source) { return Lexer(source).run(); }

}  // namespace paragraph
