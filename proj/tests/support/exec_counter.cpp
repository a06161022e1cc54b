#include "support/exec_counter.hpp"

#include <cstdint>
#include <stdexcept>

namespace paragraph::testing {

namespace {

class Interpreter {
public:
    explicit Interpreter(const Ast& ast) : ast_(ast) {}

    std::map<NodeId, long long> run() {
        const AstNode& tu = ast_.node(ast_.root);
        counts_[tu.id]++;
        for (NodeId c : tu.children) {
            const AstNode& n = ast_.node(c);
            if (n.kind == NodeKind::FunctionDecl)
                exec_function(n);
            else
                exec_stmt(c);
        }
        return counts_;
    }

private:
    using Value = std::uint64_t;  // wrapping arithmetic; values never steer control flow here

    void exec_function(const AstNode& fn) {
        counts_[fn.id]++;
        for (std::size_t i = 0; i + 1 < fn.children.size(); i++) {
            counts_[fn.children[i]]++;  // parameters, zero-initialized
            env_[ast_.node(fn.children[i]).token_text] = 0;
        }
        if (!fn.children.empty()) exec_stmt(fn.children.back());
    }

    void exec_stmt(NodeId id) {
        const AstNode& n = ast_.node(id);
        switch (n.kind) {
            case NodeKind::CompoundStmt:
                counts_[id]++;
                for (NodeId c : n.children) exec_stmt(c);
                return;
            case NodeKind::DeclStmt:
                counts_[id]++;
                for (NodeId c : n.children) {
                    const AstNode& var = ast_.node(c);
                    counts_[c]++;
                    env_[var.token_text] = var.children.empty() ? 0 : eval(var.children[0]);
                }
                return;
            case NodeKind::ForStmt:
                exec_for(n);
                return;
            case NodeKind::ReturnStmt:
                counts_[id]++;
                if (!n.children.empty()) eval(n.children[0]);
                return;
            case NodeKind::OmpDirective:
                counts_[id]++;
                exec_stmt(n.children.at(0));
                return;
            case NodeKind::IfStmt:
            case NodeKind::WhileStmt:
                throw std::runtime_error(std::string("execution-count oracle does not cover ") +
                                         node_kind_name(n.kind));
            default:
                eval(id);  // expression statement
                return;
        }
    }

    void exec_for(const AstNode& loop) {
        counts_[loop.id]++;
        NodeId init = loop.children[0], cond = loop.children[1], body = loop.children[2],
               inc = loop.children[3];
        if (ast_.node(init).kind == NodeKind::DeclStmt)
            exec_stmt(init);
        else
            eval(init);

        // count the condition once per executed iteration (the weight
        // model's convention); the final false check goes uncounted
        long long guard = 0;
        for (;;) {
            if (eval_silent(cond) == 0) break;
            if (++guard > 100'000'000LL) throw std::runtime_error("runaway loop in oracle program");
            eval(cond);
            exec_stmt(body);
            eval(inc);
        }
    }

    Value eval(NodeId id) { return eval_impl(id, true); }
    Value eval_silent(NodeId id) { return eval_impl(id, false); }

    Value eval_impl(NodeId id, bool counted) {
        const AstNode& n = ast_.node(id);
        if (counted) counts_[id]++;
        switch (n.kind) {
            case NodeKind::IntegerLiteral:
                return static_cast<Value>(std::stoll(n.token_text));
            case NodeKind::FloatingLiteral:
                return 0;
            case NodeKind::DeclRefExpr: {
                auto it = env_.find(n.token_text);
                if (it == env_.end()) throw std::runtime_error("oracle: unbound " + n.token_text);
                return it->second;
            }
            case NodeKind::ImplicitCastExpr:
                return eval_impl(n.children[0], counted);
            case NodeKind::BinaryOperator:
                return eval_binary(n, counted);
            case NodeKind::UnaryOperator:
                return eval_unary(n, counted);
            case NodeKind::CallExpr: {
                for (NodeId c : n.children) eval_impl(c, counted);
                return 0;
            }
            default:
                throw std::runtime_error(std::string("oracle: unsupported expression ") +
                                         node_kind_name(n.kind));
        }
    }

    std::string lvalue_name(NodeId id, bool counted) {
        const AstNode& n = ast_.node(id);
        if (counted) counts_[id]++;
        if (n.kind == NodeKind::ImplicitCastExpr) return lvalue_name(n.children[0], counted);
        if (n.kind == NodeKind::DeclRefExpr) return n.token_text;
        throw std::runtime_error("oracle: unsupported lvalue");
    }

    Value eval_binary(const AstNode& n, bool counted) {
        const std::string& op = n.token_text;
        if (op == "=" || op == "+=" || op == "-=" || op == "*=" || op == "/=" || op == "%=") {
            std::string name = lvalue_name(n.children[0], counted);
            Value rhs = eval_impl(n.children[1], counted);
            Value& slot = env_[name];
            if (op == "=") slot = rhs;
            else if (op == "+=") slot += rhs;
            else if (op == "-=") slot -= rhs;
            else if (op == "*=") slot *= rhs;
            else if (op == "/=") slot = rhs ? slot / rhs : 0;
            else slot = rhs ? slot % rhs : 0;
            return slot;
        }
        Value a = eval_impl(n.children[0], counted);
        Value b = eval_impl(n.children[1], counted);
        if (op == "+") return a + b;
        if (op == "-") return a - b;
        if (op == "*") return a * b;
        if (op == "/") return b ? a / b : 0;
        if (op == "%") return b ? a % b : 0;
        auto sa = static_cast<std::int64_t>(a);
        auto sb = static_cast<std::int64_t>(b);
        if (op == "<") return sa < sb;
        if (op == ">") return sa > sb;
        if (op == "<=") return sa <= sb;
        if (op == ">=") return sa >= sb;
        if (op == "==") return a == b;
        if (op == "!=") return a != b;
        if (op == "&&") return (a != 0) && (b != 0);
        if (op == "||") return (a != 0) || (b != 0);
        throw std::runtime_error("oracle: unsupported operator " + op);
    }

    Value eval_unary(const AstNode& n, bool counted) {
        const std::string& op = n.token_text;
        if (op == "++" || op == "--") {
            std::string name = lvalue_name(n.children[0], counted);
            Value& slot = env_[name];
            Value old = slot;
            slot += (op == "++") ? 1 : static_cast<Value>(-1);
            return old;  // stored counts do not distinguish pre/post
        }
        Value v = eval_impl(n.children[0], counted);
        if (op == "-") return static_cast<Value>(-static_cast<std::int64_t>(v));
        if (op == "!") return v == 0;
        throw std::runtime_error("oracle: unsupported unary " + op);
    }

    const Ast& ast_;
    std::map<NodeId, long long> counts_;
    std::map<std::string, Value> env_;
};

}  // namespace

std::map<NodeId, long long> count_executions(const Ast& ast) { return Interpreter(ast).run(); }

bool weights_match_execution(const Ast& ast, const ParaGraph& graph, std::string* mismatch) {
    std::map<NodeId, long long> counts = count_executions(ast);
    for (const Edge& e : graph.edges) {
        if (e.etype != EdgeType::Child) continue;
        double expected = static_cast<double>(counts[e.dst]);
        if (e.weight != expected) {
            if (mismatch)
                *mismatch = "edge " + std::to_string(e.src) + "->" + std::to_string(e.dst) + " (" +
                            node_kind_name(graph.nodes[static_cast<std::size_t>(e.dst)].kind) +
                            "): weight " + std::to_string(e.weight) + ", executed " +
                            std::to_string(counts[e.dst]) + " times";
            return false;
        }
    }
    return true;
}

}  // namespace paragraph::testing
