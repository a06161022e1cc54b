#include "paragraph/parser.hpp"

#include <map>
#include <utility>

#include "paragraph/errors.hpp"
#include "paragraph/omp.hpp"

namespace paragraph {

namespace {

// Recursive-descent parser for the supported C subset: functions over
// int/float/double scalars and arrays, arithmetic/relational/logical
// operators, assignments, for/while/if/return, calls, and "#pragma omp"
// lines attached to the statement that follows them.
//
// Value uses of variables and array elements are wrapped in an
// ImplicitCastExpr (lvalue-to-rvalue); operands of ++/-- and the base of
// an array subscript stay bare. Both sides of an assignment are value
// uses here: "x = 50" puts the cast over the left-hand DeclRefExpr.
class Parser {
public:
    explicit Parser(const std::vector<Token>& tokens) : toks_(tokens) {}

    Ast run() {
        NodeId tu = make_node(NodeKind::TranslationUnit, "");
        push_scope();
        while (!eof()) {
            if (is_type_keyword(peek())) {
                append_child(tu, parse_top_level());
            } else {
                fail("a function or declaration");
            }
        }
        pop_scope();
        return finalize(tu);
    }

private:
    // --- token plumbing ---------------------------------------------------

    bool eof() const { return pos_ >= toks_.size(); }

    const Token& peek(size_t ahead = 0) const {
        static const Token eof_tok{TokenKind::Punctuator, "<eof>", 0, 0};
        return pos_ + ahead < toks_.size() ? toks_[pos_ + ahead] : eof_tok;
    }

    const Token& advance() {
        if (eof()) fail("a token");
        return toks_[pos_++];
    }

    bool at_punct(const std::string& p) const {
        return !eof() && peek().kind == TokenKind::Punctuator && peek().text == p;
    }

    bool at_keyword(const std::string& k) const {
        return !eof() && peek().kind == TokenKind::Keyword && peek().text == k;
    }

    bool accept_punct(const std::string& p) {
        if (!at_punct(p)) return false;
        pos_++;
        return true;
    }

    const Token& expect_punct(const std::string& p) {
        if (!at_punct(p)) fail("'" + p + "'");
        return advance();
    }

    const Token& expect_ident() {
        if (eof() || peek().kind != TokenKind::Identifier) fail("an identifier");
        return advance();
    }

    [[noreturn]] void fail(const std::string& expected) const {
        const Token& t = peek();
        SourceLocation loc{t.line, t.column};
        std::string found = eof() ? "end of input" : "'" + t.text + "'";
        throw ParseError(loc, "expected " + expected + ", found " + found);
    }

    static bool is_type_keyword(const Token& t) {
        return t.kind == TokenKind::Keyword &&
               (t.text == "int" || t.text == "float" || t.text == "double" || t.text == "void");
    }

    // --- node construction --------------------------------------------------

    NodeId make_node(NodeKind kind, const std::string& text) {
        AstNode n;
        n.id = static_cast<NodeId>(nodes_.size());
        n.kind = kind;
        n.token_text = text;
        if (!eof()) n.loc = {peek().line, peek().column};
        nodes_.push_back(std::move(n));
        return nodes_.back().id;
    }

    NodeId make_node_at(NodeKind kind, const std::string& text, const Token& tok) {
        NodeId id = make_node(kind, text);
        nodes_[static_cast<size_t>(id)].loc = {tok.line, tok.column};
        return id;
    }

    void append_child(NodeId parent, NodeId child) {
        nodes_[static_cast<size_t>(parent)].children.push_back(child);
    }

    NodeId wrap_cast(NodeId inner) {
        NodeId cast = make_node(NodeKind::ImplicitCastExpr, "");
        nodes_[static_cast<size_t>(cast)].loc = nodes_[static_cast<size_t>(inner)].loc;
        append_child(cast, inner);
        return cast;
    }

    // lvalue-to-rvalue wrapping at a value-use site
    NodeId rvalue(NodeId expr) {
        NodeKind k = nodes_[static_cast<size_t>(expr)].kind;
        if (k == NodeKind::DeclRefExpr || k == NodeKind::ArraySubscriptExpr)
            return wrap_cast(expr);
        return expr;
    }

    // --- scopes ---------------------------------------------------------------

    void push_scope() { scopes_.emplace_back(); }
    void pop_scope() { scopes_.pop_back(); }

    void declare(const std::string& name, NodeId decl, const Token& tok) {
        auto& scope = scopes_.back();
        if (scope.count(name))
            throw ParseError({tok.line, tok.column}, "redeclaration of '" + name + "'");
        scope[name] = decl;
    }

    NodeId resolve(const Token& tok) const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto found = it->find(tok.text);
            if (found != it->end()) return found->second;
        }
        throw UnresolvedRefError({tok.line, tok.column}, tok.text);
    }

    // --- declarations -----------------------------------------------------------

    NodeId parse_top_level() {
        const Token& type_tok = advance();  // type keyword
        const Token& name = expect_ident();
        if (at_punct("(")) return parse_function(name);
        // global variable declaration
        NodeId ds = parse_decl_rest(type_tok, name);
        return ds;
    }

    NodeId parse_function(const Token& name) {
        NodeId fn = make_node_at(NodeKind::FunctionDecl, name.text, name);
        push_scope();
        expect_punct("(");
        if (!at_punct(")")) {
            do {
                if (!is_type_keyword(peek())) fail("a parameter type");
                advance();
                const Token& pname = expect_ident();
                NodeId parm = make_node_at(NodeKind::ParmVarDecl, pname.text, pname);
                while (accept_punct("[")) {
                    if (!at_punct("]")) append_child(parm, rvalue(parse_expression()));
                    expect_punct("]");
                }
                declare(pname.text, parm, pname);
                append_child(fn, parm);
            } while (accept_punct(","));
        }
        expect_punct(")");
        append_child(fn, parse_compound());
        pop_scope();
        return fn;
    }

    // Parses declarators after "type name" has been consumed; returns a DeclStmt.
    NodeId parse_decl_rest(const Token& type_tok, const Token& first_name) {
        NodeId ds = make_node_at(NodeKind::DeclStmt, "", type_tok);
        parse_declarator(ds, first_name);
        while (accept_punct(",")) {
            const Token& name = expect_ident();
            parse_declarator(ds, name);
        }
        expect_punct(";");
        return ds;
    }

    void parse_declarator(NodeId ds, const Token& name) {
        NodeId var = make_node_at(NodeKind::VarDecl, name.text, name);
        while (accept_punct("[")) {
            append_child(var, rvalue(parse_expression()));
            expect_punct("]");
        }
        if (accept_punct("=")) append_child(var, rvalue(parse_assignment()));
        declare(name.text, var, name);
        append_child(ds, var);
    }

    // --- statements ----------------------------------------------------------

    NodeId parse_statement() {
        if (!eof() && peek().kind == TokenKind::PragmaLine) return parse_omp();
        if (at_punct("{")) return parse_compound();
        if (at_keyword("for")) return parse_for();
        if (at_keyword("while")) return parse_while();
        if (at_keyword("if")) return parse_if();
        if (at_keyword("return")) return parse_return();
        if (!eof() && is_type_keyword(peek())) {
            const Token& type_tok = advance();
            const Token& name = expect_ident();
            return parse_decl_rest(type_tok, name);
        }
        NodeId expr = parse_expression();
        expect_punct(";");
        return expr;
    }

    NodeId parse_compound() {
        const Token& open = peek();
        expect_punct("{");
        NodeId cs = make_node_at(NodeKind::CompoundStmt, "", open);
        push_scope();
        while (!at_punct("}")) {
            if (eof()) fail("'}'");
            append_child(cs, parse_statement());
        }
        expect_punct("}");
        pop_scope();
        return cs;
    }

    NodeId parse_omp() {
        const Token& pragma = advance();
        parse_omp_directive(pragma.text);  // validate clause syntax up front
        NodeId omp = make_node_at(NodeKind::OmpDirective, "", pragma);
        nodes_[static_cast<size_t>(omp)].directive_text = pragma.text;
        NodeId stmt = parse_statement();
        NodeKind k = nodes_[static_cast<size_t>(stmt)].kind;
        if (k != NodeKind::ForStmt && k != NodeKind::CompoundStmt)
            throw ParseError({pragma.line, pragma.column},
                             "OpenMP pragma must annotate a for loop or a block");
        append_child(omp, stmt);
        return omp;
    }

    // Children stored as (init, cond, body, inc); token order still has the
    // increment before the body (see Ast::recompute_tokens).
    NodeId parse_for() {
        const Token& kw = advance();
        NodeId loop = make_node_at(NodeKind::ForStmt, "", kw);
        push_scope();
        expect_punct("(");
        NodeId init;
        if (is_type_keyword(peek())) {
            const Token& type_tok = advance();
            const Token& name = expect_ident();
            init = parse_decl_rest(type_tok, name);  // consumes ';'
        } else {
            init = parse_expression();
            expect_punct(";");
        }
        NodeId cond = rvalue(parse_expression());
        expect_punct(";");
        NodeId inc = parse_expression();
        expect_punct(")");
        NodeId body = parse_statement();
        append_child(loop, init);
        append_child(loop, cond);
        append_child(loop, body);
        append_child(loop, inc);
        pop_scope();
        return loop;
    }

    NodeId parse_while() {
        const Token& kw = advance();
        NodeId loop = make_node_at(NodeKind::WhileStmt, "", kw);
        expect_punct("(");
        append_child(loop, rvalue(parse_expression()));
        expect_punct(")");
        append_child(loop, parse_statement());
        return loop;
    }

    NodeId parse_if() {
        const Token& kw = advance();
        NodeId stmt = make_node_at(NodeKind::IfStmt, "", kw);
        expect_punct("(");
        append_child(stmt, rvalue(parse_expression()));
        expect_punct(")");
        append_child(stmt, parse_statement());
        if (at_keyword("else")) {
            advance();
            append_child(stmt, parse_statement());
        }
        return stmt;
    }

    NodeId parse_return() {
        const Token& kw = advance();
        NodeId ret = make_node_at(NodeKind::ReturnStmt, "", kw);
        if (!at_punct(";")) append_child(ret, rvalue(parse_expression()));
        expect_punct(";");
        return ret;
    }

    // --- expressions --------------------------------------------------------

    NodeId parse_expression() { return parse_assignment(); }

    NodeId parse_assignment() {
        NodeId lhs = parse_logical_or();
        static const char* ops[] = {"=", "+=", "-=", "*=", "/=", "%="};
        for (const char* op : ops) {
            if (at_punct(op)) {
                const Token& tok = advance();
                NodeKind k = nodes_[static_cast<size_t>(lhs)].kind;
                if (k != NodeKind::DeclRefExpr && k != NodeKind::ArraySubscriptExpr)
                    throw ParseError({tok.line, tok.column}, "assignment target is not assignable");
                NodeId bin = make_node_at(NodeKind::BinaryOperator, op, tok);
                append_child(bin, rvalue(lhs));
                append_child(bin, rvalue(parse_assignment()));
                return bin;
            }
        }
        return lhs;
    }

    NodeId parse_binary_level(int level) {
        // levels from loosest to tightest
        static const std::vector<std::vector<std::string>> table = {
            {"||"}, {"&&"}, {"==", "!="}, {"<", ">", "<=", ">="}, {"+", "-"}, {"*", "/", "%"}};
        if (level >= static_cast<int>(table.size())) return parse_unary();
        NodeId lhs = parse_binary_level(level + 1);
        for (;;) {
            bool matched = false;
            for (const std::string& op : table[static_cast<size_t>(level)]) {
                if (at_punct(op)) {
                    const Token& tok = advance();
                    NodeId bin = make_node_at(NodeKind::BinaryOperator, op, tok);
                    append_child(bin, rvalue(lhs));
                    append_child(bin, rvalue(parse_binary_level(level + 1)));
                    lhs = bin;
                    matched = true;
                    break;
                }
            }
            if (!matched) return lhs;
        }
    }

    NodeId parse_logical_or() { return parse_binary_level(0); }

    NodeId parse_unary() {
        static const char* prefix[] = {"++", "--", "-", "!"};
        for (const char* op : prefix) {
            if (at_punct(op)) {
                const Token& tok = advance();
                NodeId node = make_node_at(NodeKind::UnaryOperator, op, tok);
                NodeId operand = parse_unary();
                // ++/-- modify in place: no cast over the operand
                if (op[0] == '-' && op[1] == '\0') operand = rvalue(operand);
                if (op[0] == '!') operand = rvalue(operand);
                append_child(node, operand);
                return node;
            }
        }
        return parse_postfix();
    }

    NodeId parse_postfix() {
        NodeId expr = parse_primary();
        for (;;) {
            if (at_punct("[")) {
                const Token& tok = advance();
                NodeId sub = make_node_at(NodeKind::ArraySubscriptExpr, "", tok);
                append_child(sub, expr);  // array base stays bare
                append_child(sub, rvalue(parse_expression()));
                expect_punct("]");
                expr = sub;
            } else if (at_punct("++") || at_punct("--")) {
                const Token& tok = advance();
                NodeId node = make_node_at(NodeKind::UnaryOperator, tok.text, tok);
                append_child(node, expr);
                expr = node;
            } else {
                return expr;
            }
        }
    }

    NodeId parse_primary() {
        if (eof()) fail("an expression");
        const Token& t = peek();
        switch (t.kind) {
            case TokenKind::IntegerLiteral:
                advance();
                return make_node_at(NodeKind::IntegerLiteral, t.text, t);
            case TokenKind::FloatLiteral:
                advance();
                return make_node_at(NodeKind::FloatingLiteral, t.text, t);
            case TokenKind::Identifier: {
                advance();
                if (at_punct("(")) return parse_call(t);
                NodeId ref = make_node_at(NodeKind::DeclRefExpr, t.text, t);
                nodes_[static_cast<size_t>(ref)].decl_ref = resolve(t);
                return ref;
            }
            case TokenKind::Punctuator:
                if (t.text == "(") {
                    advance();
                    NodeId inner = parse_expression();
                    expect_punct(")");
                    return inner;
                }
                break;
            default:
                break;
        }
        fail("an expression");
    }

    NodeId parse_call(const Token& callee) {
        NodeId call = make_node_at(NodeKind::CallExpr, callee.text, callee);
        expect_punct("(");
        if (!at_punct(")")) {
            do {
                append_child(call, rvalue(parse_assignment()));
            } while (accept_punct(","));
        }
        expect_punct(")");
        return call;
    }

    // --- finalization ----------------------------------------------------------

    // Renumbers nodes in pre-order over stored children, remaps decl_refs,
    // and rebuilds the token list.
    Ast finalize(NodeId root) {
        std::vector<NodeId> order;
        order.reserve(nodes_.size());
        std::vector<NodeId> stack{root};
        while (!stack.empty()) {
            NodeId id = stack.back();
            stack.pop_back();
            order.push_back(id);
            const auto& ch = nodes_[static_cast<size_t>(id)].children;
            for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
        }
        std::vector<NodeId> remap(nodes_.size(), -1);
        for (size_t i = 0; i < order.size(); i++) remap[static_cast<size_t>(order[i])] = static_cast<NodeId>(i);

        Ast ast;
        ast.root = 0;
        ast.nodes.resize(order.size());
        for (size_t i = 0; i < order.size(); i++) {
            AstNode n = nodes_[static_cast<size_t>(order[i])];
            n.id = static_cast<NodeId>(i);
            for (NodeId& c : n.children) c = remap[static_cast<size_t>(c)];
            if (n.decl_ref) n.decl_ref = remap[static_cast<size_t>(*n.decl_ref)];
            ast.nodes[i] = std::move(n);
        }
        ast.recompute_tokens();
        return ast;
    }

    const std::vector<Token>& toks_;
    size_t pos_ = 0;
    std::vector<AstNode> nodes_;
    std::vector<std::map<std::string, NodeId>> scopes_;
};

}  // namespace

Ast parse(const std::vector<Token>& tokens) { return Parser(tokens).run(); }

Ast parse_source(const std::string& source) { return parse(tokenize(source)); }

}  // namespace paragraph
