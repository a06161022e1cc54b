#include <doctest.h>

#include <fstream>

#include "paragraph/errors.hpp"
#include "paragraph/omp.hpp"
#include "paragraph/parser.hpp"
#include "paragraph/pipeline.hpp"
#include "paragraph/variant.hpp"

using namespace paragraph;

namespace {

KernelSpec matmul_spec() {
    std::ifstream in(std::string(PARAGRAPH_KERNELS_DIR) + "/matmul.json");
    REQUIRE(in);
    nlohmann::json doc;
    in >> doc;
    return kernel_spec_from_json(doc);
}

KernelSpec vector_add_spec() {
    std::ifstream in(std::string(PARAGRAPH_KERNELS_DIR) + "/vector_add.json");
    REQUIRE(in);
    nlohmann::json doc;
    in >> doc;
    return kernel_spec_from_json(doc);
}

int count_directives(const std::string& source) {
    Ast ast = parse_source(source);
    int n = 0;
    for (const AstNode& node : ast.nodes)
        if (node.kind == NodeKind::OmpDirective) n++;
    return n;
}

}  // namespace

TEST_CASE("matmul nest is collapsible") {
    KernelSpec spec = matmul_spec();
    Ast ast = parse_source(spec.source);
    CHECK(detect_collapsible(ast, find_kernel_loop(ast, "matmul")));
}

TEST_CASE("a statement before the inner loop breaks collapsibility") {
    const char* src =
        "void k(int n, double a[]) {\n"
        "    for (int i = 0; i < n; i++) {\n"
        "        a[i] = 0.0;\n"
        "        for (int j = 0; j < n; j++) { a[i] = a[i] + 1.0; }\n"
        "    }\n"
        "}\n";
    Ast ast = parse_source(src);
    CHECK(!detect_collapsible(ast, find_kernel_loop(ast, "k")));
}

TEST_CASE("triangular inner bounds break collapsibility") {
    const char* src =
        "void k(int n, double a[]) {\n"
        "    for (int i = 0; i < n; i++) {\n"
        "        for (int j = i; j < n; j++) { a[j] = a[j] + 1.0; }\n"
        "    }\n"
        "}\n";
    Ast ast = parse_source(src);
    NodeId loop = find_kernel_loop(ast, "k");
    CHECK(!detect_collapsible(ast, loop));

    // symbol-scan oracle: the outer induction variable appears inside the
    // inner loop's init subtree
    const AstNode& outer = ast.node(loop);
    const AstNode& inner = ast.node(ast.node(outer.children[2]).children[0]);
    bool referenced = false;
    std::vector<NodeId> stack{inner.children[0], inner.children[1], inner.children[3]};
    while (!stack.empty()) {
        NodeId id = stack.back();
        stack.pop_back();
        const AstNode& n = ast.node(id);
        if (n.kind == NodeKind::DeclRefExpr && n.token_text == "i") referenced = true;
        for (NodeId c : n.children) stack.push_back(c);
    }
    CHECK(referenced);
}

TEST_CASE("directive text per variant kind") {
    KernelSpec spec = matmul_spec();
    VariantParams params;
    params.sizes["n"] = 64;
    params.num_teams = 128;
    params.num_threads = 64;

    CHECK(variant_directive(spec, VariantKind::Cpu, params) ==
          "#pragma omp parallel for num_threads(64)");
    CHECK(variant_directive(spec, VariantKind::CpuCollapse, params) ==
          "#pragma omp parallel for collapse(2) num_threads(64)");
    CHECK(variant_directive(spec, VariantKind::Gpu, params) ==
          "#pragma omp target teams distribute parallel for num_teams(128) num_threads(64)");
    CHECK(variant_directive(spec, VariantKind::GpuCollapse, params) ==
          "#pragma omp target teams distribute parallel for collapse(2) num_teams(128) num_threads(64)");
    CHECK(variant_directive(spec, VariantKind::GpuMem, params) ==
          "#pragma omp target teams distribute parallel for num_teams(128) num_threads(64) "
          "map(to: a[0:n*n]) map(to: b[0:n*n]) map(from: c[0:n*n])");
    CHECK(variant_directive(spec, VariantKind::GpuCollapseMem, params) ==
          "#pragma omp target teams distribute parallel for collapse(2) num_teams(128) "
          "num_threads(64) map(to: a[0:n*n]) map(to: b[0:n*n]) map(from: c[0:n*n])");
}

TEST_CASE("map clause synthesis follows data_arrays order and directions") {
    KernelSpec spec;
    spec.kernel_name = "k";
    spec.source = "void k(int N, double a[], double b[]) {\n    for (int i = 0; i < N; i++) { a[i] = b[i]; }\n}\n";
    spec.data_arrays = {{"a", "double", "N", "tofrom"}, {"b", "double", "N", "to"}};
    VariantParams params;
    params.num_teams = 4;
    params.num_threads = 2;
    std::string d = variant_directive(spec, VariantKind::GpuMem, params);
    CHECK(d.find("map(tofrom: a[0:N]) map(to: b[0:N])") != std::string::npos);
}

TEST_CASE("generated variants re-parse with exactly one directive") {
    KernelSpec spec = matmul_spec();
    VariantParams params;
    params.sizes["n"] = 16;
    params.num_teams = 4;
    params.num_threads = 8;
    for (VariantKind kind : {VariantKind::Cpu, VariantKind::CpuCollapse, VariantKind::Gpu,
                             VariantKind::GpuCollapse, VariantKind::GpuMem,
                             VariantKind::GpuCollapseMem}) {
        KernelVariant v = generate_variant(spec, kind, params);
        CHECK(count_directives(v.source) == 1);

        // clause list round-trips through the parsed AST
        Ast ast = parse_source(v.source);
        for (const AstNode& n : ast.nodes) {
            if (n.kind != NodeKind::OmpDirective) continue;
            OmpDirectiveInfo info = parse_omp_directive(*n.directive_text);
            OmpDirectiveInfo again = parse_omp_directive(info.render());
            CHECK(info == again);
            CHECK(info.num_threads() == 8);
        }
    }
}

TEST_CASE("collapse kinds on a non-collapsible kernel are rejected") {
    KernelSpec spec = vector_add_spec();
    VariantParams params;
    params.num_threads = 4;
    CHECK_THROWS_AS(generate_variant(spec, VariantKind::CpuCollapse, params), VariantError);
    CHECK_THROWS_AS(generate_variant(spec, VariantKind::GpuCollapseMem, params), VariantError);
}

TEST_CASE("enumeration counts: collapsible kernel, 3 sizes x 2 teams x 2 threads = 60") {
    KernelSpec spec = matmul_spec();
    auto points = enumerate_dataset_points(spec, {8, 12, 16}, {2, 4}, {2, 4});
    CHECK(points.size() == 60);  // gpu family 4*12 + cpu family 2*6

    std::map<std::string, int> by_kind;
    for (const auto& v : points) by_kind[variant_kind_name(v.kind)]++;
    CHECK(by_kind["cpu"] == 6);
    CHECK(by_kind["cpu_collapse"] == 6);
    CHECK(by_kind["gpu"] == 12);
    CHECK(by_kind["gpu_collapse"] == 12);
    CHECK(by_kind["gpu_mem"] == 12);
    CHECK(by_kind["gpu_collapse_mem"] == 12);
    for (const auto& v : points)
        if (!variant_is_gpu(v.kind)) CHECK(v.params.num_teams == 1);
}

TEST_CASE("non-collapsible kernels only get cpu, gpu, gpu_mem") {
    KernelSpec spec = vector_add_spec();
    auto points = enumerate_dataset_points(spec, {8}, {2}, {2});
    REQUIRE(points.size() == 3);
    CHECK(points[0].kind == VariantKind::Cpu);
    CHECK(points[1].kind == VariantKind::Gpu);
    CHECK(points[2].kind == VariantKind::GpuMem);
}

TEST_CASE("empty size grid yields no points") {
    CHECK(enumerate_dataset_points(matmul_spec(), {}, {2}, {2}).empty());
}

TEST_CASE("size parameters are the int scalars of the signature") {
    KernelSpec spec = matmul_spec();
    CHECK(size_parameter_names(spec) == std::vector<std::string>{"n"});

    KernelSpec saxpy;
    std::ifstream in(std::string(PARAGRAPH_KERNELS_DIR) + "/saxpy.json");
    nlohmann::json doc;
    in >> doc;
    saxpy = kernel_spec_from_json(doc);
    CHECK(size_parameter_names(saxpy) == std::vector<std::string>{"n"});  // alpha is double
}

TEST_CASE("kernel spec validation rejects bad declarations") {
    nlohmann::json doc = kernel_spec_to_json(matmul_spec());
    doc["collapsible"] = true;
    doc["source"] =
        "void matmul(int n, double a[]) {\n"
        "    for (int i = 0; i < n; i++) { a[i] = 1.0; }\n"
        "}\n";
    CHECK_THROWS_AS(kernel_spec_from_json(doc), SchemaError);

    nlohmann::json missing;
    missing["kernel_name"] = "k";
    CHECK_THROWS_AS(kernel_spec_from_json(missing), SchemaError);
}

TEST_CASE("variant manifest round-trips through the filesystem") {
    KernelSpec spec = matmul_spec();
    std::string dir = "/tmp/paragraph_unit_variants";
    auto written = write_variants(spec, {8}, {2}, {4}, dir);
    auto read = read_variant_manifest(dir);
    REQUIRE(read.size() == written.size());
    for (std::size_t i = 0; i < read.size(); i++) {
        CHECK(read[i].file == written[i].file);
        CHECK(read[i].kind == written[i].kind);
        CHECK(read[i].params.sizes == written[i].params.sizes);
        CHECK(read[i].params.num_teams == written[i].params.num_teams);
        CHECK(read[i].params.num_threads == written[i].params.num_threads);
    }
}

TEST_CASE("harness prints the marker protocol") {
    KernelSpec spec = vector_add_spec();
    VariantParams params;
    params.sizes["n"] = 32;
    params.num_threads = 2;
    KernelVariant v = generate_variant(spec, VariantKind::Cpu, params);
    std::string h = generate_harness(spec, v);
    CHECK(h.find("KERNEL_TIME_US=") != std::string::npos);
    CHECK(h.find("gettimeofday") != std::string::npos);
    CHECK(h.find("int n = 32;") != std::string::npos);
    CHECK(h.find(v.source) != std::string::npos);
}
