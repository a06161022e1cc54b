#include "paragraph/variant.hpp"

#include <algorithm>
#include <sstream>

#include "paragraph/errors.hpp"
#include "paragraph/omp.hpp"
#include "paragraph/parser.hpp"
#include "paragraph/token.hpp"

namespace paragraph {

const char* variant_kind_name(VariantKind k) {
    switch (k) {
        case VariantKind::Cpu: return "cpu";
        case VariantKind::CpuCollapse: return "cpu_collapse";
        case VariantKind::Gpu: return "gpu";
        case VariantKind::GpuCollapse: return "gpu_collapse";
        case VariantKind::GpuMem: return "gpu_mem";
        case VariantKind::GpuCollapseMem: return "gpu_collapse_mem";
    }
    return "?";
}

std::optional<VariantKind> variant_kind_from_name(const std::string& name) {
    static const std::pair<const char*, VariantKind> table[] = {
        {"cpu", VariantKind::Cpu},
        {"cpu_collapse", VariantKind::CpuCollapse},
        {"gpu", VariantKind::Gpu},
        {"gpu_collapse", VariantKind::GpuCollapse},
        {"gpu_mem", VariantKind::GpuMem},
        {"gpu_collapse_mem", VariantKind::GpuCollapseMem},
    };
    for (const auto& [n, k] : table)
        if (name == n) return k;
    return std::nullopt;
}

bool variant_requires_collapse(VariantKind k) {
    return k == VariantKind::CpuCollapse || k == VariantKind::GpuCollapse ||
           k == VariantKind::GpuCollapseMem;
}

bool variant_is_gpu(VariantKind k) {
    return k == VariantKind::Gpu || k == VariantKind::GpuCollapse || k == VariantKind::GpuMem ||
           k == VariantKind::GpuCollapseMem;
}

namespace {

struct SigParam {
    std::string type;
    std::string name;
    bool is_array = false;
};

// Kernel signature, recovered from the token stream (the AST does not
// record declared types).
std::vector<SigParam> parse_signature(const KernelSpec& spec) {
    std::vector<Token> toks = tokenize(spec.source);
    size_t i = 0;
    for (; i + 1 < toks.size(); i++) {
        if (toks[i].kind == TokenKind::Identifier && toks[i].text == spec.kernel_name &&
            toks[i + 1].kind == TokenKind::Punctuator && toks[i + 1].text == "(")
            break;
    }
    if (i + 1 >= toks.size())
        throw VariantError("kernel function '" + spec.kernel_name + "' not found in source");
    i += 2;
    std::vector<SigParam> params;
    SigParam cur;
    int depth = 1;
    for (; i < toks.size() && depth > 0; i++) {
        const Token& t = toks[i];
        if (t.kind == TokenKind::Punctuator) {
            if (t.text == "(") depth++;
            if (t.text == ")" && --depth == 0) break;
            if (t.text == "," && depth == 1) {
                if (!cur.name.empty()) params.push_back(cur);
                cur = {};
                continue;
            }
            if (t.text == "[") cur.is_array = true;
            continue;
        }
        if (t.kind == TokenKind::Keyword && cur.type.empty()) {
            cur.type = t.text;
        } else if (t.kind == TokenKind::Identifier && cur.name.empty()) {
            cur.name = t.text;
        }
    }
    if (!cur.name.empty()) params.push_back(cur);
    return params;
}

std::optional<std::string> induction_var(const Ast& ast, NodeId loop) {
    const AstNode& n = ast.node(loop);
    if (n.kind != NodeKind::ForStmt || n.children.size() != 4) return std::nullopt;
    const AstNode& init = ast.node(n.children[0]);
    if (init.kind == NodeKind::DeclStmt && init.children.size() == 1)
        return ast.node(init.children[0]).token_text;
    if (init.kind == NodeKind::BinaryOperator && init.token_text == "=") {
        NodeId lhs = init.children[0];
        const AstNode& l = ast.node(lhs);
        if (l.kind == NodeKind::ImplicitCastExpr) return ast.node(l.children[0]).token_text;
        return l.token_text;
    }
    return std::nullopt;
}

bool subtree_references(const Ast& ast, NodeId id, const std::string& name) {
    const AstNode& n = ast.node(id);
    if (n.kind == NodeKind::DeclRefExpr && n.token_text == name) return true;
    for (NodeId c : n.children)
        if (subtree_references(ast, c, name)) return true;
    return false;
}

}  // namespace

NodeId find_kernel_loop(const Ast& ast, const std::string& kernel_name) {
    for (const AstNode& n : ast.nodes) {
        if (n.kind != NodeKind::FunctionDecl || n.token_text != kernel_name) continue;
        if (n.children.empty()) continue;
        const AstNode& body = ast.node(n.children.back());
        if (body.kind != NodeKind::CompoundStmt) continue;
        for (NodeId stmt : body.children) {
            if (ast.node(stmt).kind == NodeKind::ForStmt) return stmt;
        }
    }
    throw VariantError("no top-level for loop found in kernel '" + kernel_name + "'");
}

bool detect_collapsible(const Ast& ast, NodeId kernel_loop) {
    const AstNode& outer = ast.node(kernel_loop);
    if (outer.kind != NodeKind::ForStmt || outer.children.size() != 4) return false;
    const AstNode& body = ast.node(outer.children[2]);
    if (body.kind != NodeKind::CompoundStmt || body.children.size() != 1) return false;
    const AstNode& inner = ast.node(body.children[0]);
    if (inner.kind != NodeKind::ForStmt || inner.children.size() != 4) return false;
    auto var = induction_var(ast, kernel_loop);
    if (!var) return false;
    // inner init/cond/inc must be independent of the outer induction variable
    for (size_t i : {size_t{0}, size_t{1}, size_t{3}})
        if (subtree_references(ast, inner.children[i], *var)) return false;
    return true;
}

std::string variant_directive(const KernelSpec& spec, VariantKind kind, const VariantParams& params) {
    std::string d = "#pragma omp ";
    d += variant_is_gpu(kind) ? "target teams distribute parallel for" : "parallel for";
    if (variant_requires_collapse(kind)) d += " collapse(2)";
    if (variant_is_gpu(kind)) d += " num_teams(" + std::to_string(params.num_teams) + ")";
    d += " num_threads(" + std::to_string(params.num_threads) + ")";
    if (kind == VariantKind::GpuMem || kind == VariantKind::GpuCollapseMem) {
        for (const DataArray& a : spec.data_arrays)
            d += " map(" + a.direction + ": " + a.name + "[0:" + a.extent + "])";
    }
    return d;
}

KernelVariant generate_variant(const KernelSpec& spec, VariantKind kind, const VariantParams& params) {
    if (variant_requires_collapse(kind) && !spec.collapsible)
        throw VariantError(std::string(variant_kind_name(kind)) +
                           " requires a collapsible kernel, and '" + spec.kernel_name + "' is not");

    Ast ast = parse_source(spec.source);
    NodeId loop = find_kernel_loop(ast, spec.kernel_name);
    int loop_line = ast.node(loop).loc.line;

    std::vector<std::string> lines;
    std::istringstream in(spec.source);
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    if (loop_line < 1 || loop_line > static_cast<int>(lines.size()))
        throw VariantError("kernel loop line out of range");

    const std::string& at = lines[static_cast<size_t>(loop_line - 1)];
    std::string indent = at.substr(0, at.find_first_not_of(" \t"));

    std::string out;
    for (size_t i = 0; i < lines.size(); i++) {
        if (static_cast<int>(i) == loop_line - 1)
            out += indent + variant_directive(spec, kind, params) + "\n";
        out += lines[i] + "\n";
    }

    KernelVariant v{kind, out, params};

    // every generated variant must re-parse with exactly one directive
    Ast check = parse_source(v.source);
    int directives = 0;
    for (const AstNode& n : check.nodes)
        if (n.kind == NodeKind::OmpDirective) directives++;
    if (directives != 1)
        throw VariantError("generated variant has " + std::to_string(directives) +
                           " directives; expected exactly 1");
    return v;
}

std::vector<std::string> size_parameter_names(const KernelSpec& spec) {
    std::vector<std::string> names;
    for (const SigParam& p : parse_signature(spec))
        if (!p.is_array && p.type == "int") names.push_back(p.name);
    return names;
}

std::string generate_harness(const KernelSpec& spec, const KernelVariant& variant) {
    std::vector<SigParam> sig = parse_signature(spec);
    std::ostringstream h;
    h << "/* timing harness for " << spec.kernel_name << " (" << variant_kind_name(variant.kind)
      << ") */\n";
    h << "#include <stdio.h>\n#include <stdlib.h>\n#include <sys/time.h>\n\n";
    h << variant.source << "\n";
    h << "int main(void) {\n";

    auto extent_of = [&](const std::string& name) -> std::string {
        for (const DataArray& a : spec.data_arrays)
            if (a.name == name) return a.extent;
        return variant.params.sizes.empty() ? std::string("1")
                                            : variant.params.sizes.begin()->first;
    };

    for (const SigParam& p : sig) {
        if (p.is_array) continue;
        if (p.type == "int") {
            auto it = variant.params.sizes.find(p.name);
            long long v = it != variant.params.sizes.end() ? it->second : 1;
            h << "    int " << p.name << " = " << v << ";\n";
        } else {
            h << "    " << p.type << " " << p.name << " = 1.0;\n";
        }
    }
    for (const SigParam& p : sig) {
        if (!p.is_array) continue;
        std::string ext = extent_of(p.name);
        h << "    " << p.type << "* " << p.name << " = (" << p.type << "*)malloc(sizeof(" << p.type
          << ") * (size_t)(" << ext << "));\n";
        h << "    for (long _i = 0; _i < (long)(" << ext << "); _i++) " << p.name
          << "[_i] = 0.5 + (" << p.type << ")(_i % 7);\n";
    }
    h << "    struct timeval _t0, _t1;\n";
    h << "    gettimeofday(&_t0, 0);\n";
    h << "    " << spec.kernel_name << "(";
    for (size_t i = 0; i < sig.size(); i++) h << (i ? ", " : "") << sig[i].name;
    h << ");\n";
    h << "    gettimeofday(&_t1, 0);\n";
    h << "    long _us = (_t1.tv_sec - _t0.tv_sec) * 1000000L + (long)(_t1.tv_usec - _t0.tv_usec);\n";
    h << "    if (_us < 1) _us = 1;\n";
    h << "    printf(\"KERNEL_TIME_US=%ld\\n\", _us);\n";
    for (const SigParam& p : sig)
        if (p.is_array) h << "    free(" << p.name << ");\n";
    h << "    return 0;\n}\n";
    return h.str();
}

std::vector<KernelVariant> enumerate_dataset_points(const KernelSpec& spec,
                                                    const std::vector<long long>& size_grid,
                                                    const std::vector<long long>& teams_grid,
                                                    const std::vector<long long>& threads_grid) {
    static const VariantKind all_kinds[] = {VariantKind::Cpu,    VariantKind::CpuCollapse,
                                            VariantKind::Gpu,    VariantKind::GpuCollapse,
                                            VariantKind::GpuMem, VariantKind::GpuCollapseMem};
    std::vector<std::string> size_names = size_parameter_names(spec);
    std::vector<KernelVariant> points;
    for (VariantKind kind : all_kinds) {
        if (variant_requires_collapse(kind) && !spec.collapsible) continue;
        std::vector<long long> teams = variant_is_gpu(kind) ? teams_grid : std::vector<long long>{1};
        for (long long size : size_grid) {
            for (long long g : teams) {
                for (long long t : threads_grid) {
                    VariantParams params;
                    for (const std::string& name : size_names) params.sizes[name] = size;
                    params.num_teams = g;
                    params.num_threads = t;
                    points.push_back(generate_variant(spec, kind, params));
                }
            }
        }
    }
    return points;
}

KernelSpec kernel_spec_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("kernel_name") || !doc.contains("source"))
        throw SchemaError("kernel spec requires 'kernel_name' and 'source'");
    KernelSpec spec;
    spec.kernel_name = doc["kernel_name"].get<std::string>();
    spec.source = doc["source"].get<std::string>();
    spec.loop_nest_depth = doc.value("loop_nest_depth", 1);
    spec.collapsible = doc.value("collapsible", false);
    for (const auto& ja : doc.value("data_arrays", nlohmann::json::array())) {
        DataArray a;
        a.name = ja.at("name").get<std::string>();
        a.element_type = ja.at("type").get<std::string>();
        a.extent = ja.at("extent").get<std::string>();
        a.direction = ja.value("dir", "tofrom");
        if (a.direction != "to" && a.direction != "from" && a.direction != "tofrom")
            throw SchemaError("data array direction must be to|from|tofrom: " + a.direction);
        spec.data_arrays.push_back(std::move(a));
    }

    Ast ast = parse_source(spec.source);
    NodeId loop = find_kernel_loop(ast, spec.kernel_name);
    if (spec.collapsible) {
        if (spec.loop_nest_depth < 2)
            throw SchemaError("collapsible kernel must declare loop_nest_depth >= 2");
        if (!detect_collapsible(ast, loop))
            throw SchemaError("kernel '" + spec.kernel_name +
                              "' is declared collapsible but its loops are not perfectly nested");
    }
    return spec;
}

nlohmann::json kernel_spec_to_json(const KernelSpec& spec) {
    nlohmann::json arrays = nlohmann::json::array();
    for (const DataArray& a : spec.data_arrays)
        arrays.push_back({{"name", a.name}, {"type", a.element_type}, {"extent", a.extent}, {"dir", a.direction}});
    return {{"schema_version", 1},
            {"kernel_name", spec.kernel_name},
            {"source", spec.source},
            {"loop_nest_depth", spec.loop_nest_depth},
            {"collapsible", spec.collapsible},
            {"data_arrays", std::move(arrays)}};
}

}  // namespace paragraph
