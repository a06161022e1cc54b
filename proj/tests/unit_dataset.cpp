#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "paragraph/dataset.hpp"
#include "paragraph/errors.hpp"
#include "paragraph/graph_build.hpp"
#include "paragraph/measure.hpp"
#include "paragraph/parser.hpp"

using namespace paragraph;

namespace {

ParaGraph loop_graph(long long teams = 1, long long threads = 1) {
    Ast ast = parse_source("void f() { int s = 0; for (int i = 0; i < 50; i++) { s = s + 1; } }");
    return build_paragraph(ast, {}, teams, threads, GraphMode::Paragraph);
}

DataPoint point_with_runtime(double us, const std::string& app = "app") {
    DataPoint p;
    p.graph = loop_graph();
    p.app_name = app;
    p.variant_kind = VariantKind::Cpu;
    p.runtime_us = us;
    p.platform_tag = "synthetic";
    return p;
}

}  // namespace

TEST_CASE("synthetic label with unit costs equals the Child-weight sum") {
    ParaGraph g = loop_graph();
    double sum = 0.0;
    for (const Edge& e : g.edges)
        if (e.etype == EdgeType::Child) sum += e.weight;
    CHECK(synthetic_label(g, 1, 0.0, unit_cost_table()) == sum);
}

TEST_CASE("synthetic label doubles when all weights double") {
    ParaGraph g = loop_graph();
    ParaGraph doubled = g;
    for (Edge& e : doubled.edges)
        if (e.etype == EdgeType::Child) e.weight *= 2.0;
    CHECK(synthetic_label(doubled, 7, 0.0) == 2.0 * synthetic_label(g, 7, 0.0));
}

TEST_CASE("synthetic label is deterministic in graph and seed") {
    ParaGraph g = loop_graph();
    CHECK(synthetic_label(g, 42, 0.3) == synthetic_label(g, 42, 0.3));
    CHECK(synthetic_label(g, 42, 0.3) != synthetic_label(g, 43, 0.3));
}

TEST_CASE("synthetic label divides by sqrt(teams*threads)") {
    double serial = synthetic_label(loop_graph(1, 1), 1, 0.0, unit_cost_table());
    ParaGraph wide = loop_graph(1, 1);
    wide.features = {4, 9};  // same weights, different features
    CHECK(synthetic_label(wide, 1, 0.0, unit_cost_table()) == doctest::Approx(serial / 6.0));
}

TEST_CASE("scaler endpoints, midpoint, and clamping") {
    MinMaxRange r{0.0, 50.0};
    CHECK(r.scale(0.0) == 0.0);
    CHECK(r.scale(50.0) == 1.0);
    CHECK(r.scale(25.0) == 0.5);
    CHECK(r.scale(60.0) == 1.0);   // validation point beyond the fit clamps
    CHECK(r.scale(-5.0) == 0.0);
    CHECK(r.unscale(0.5) == 25.0);

    MinMaxRange degenerate{3.0, 3.0};
    CHECK(degenerate.scale(3.0) == 0.0);
    CHECK(degenerate.scale(9.0) == 0.0);
}

TEST_CASE("scaler fits on the chosen indices only (leakage guard)") {
    std::vector<DataPoint> points;
    points.push_back(point_with_runtime(100.0));
    points.push_back(point_with_runtime(200.0));
    DataPoint outlier = point_with_runtime(5000.0);
    outlier.graph.features.num_threads = 64;
    points.push_back(outlier);

    MinMaxScaler s = fit_scaler(points, {0, 1});  // the outlier is "validation"
    CHECK(s.target.max == 200.0);
    CHECK(s.threads.max == 1.0);
    CHECK(s.target.scale(5000.0) == 1.0);  // clamps rather than leaking
}

TEST_CASE("scaling preserves ordering within the fitted range") {
    MinMaxRange r{2.0, 90.0};
    std::vector<double> xs = {2.0, 7.5, 20.0, 55.0, 90.0};
    for (std::size_t i = 1; i < xs.size(); i++) CHECK(r.scale(xs[i - 1]) < r.scale(xs[i]));
}

TEST_CASE("split: 9:1 sizes, determinism, disjoint and exhaustive") {
    Split s = split_dataset(26040, 7);
    CHECK(s.val.size() == 2604);
    CHECK(s.train.size() == 26040 - 2604);

    CHECK(split_dataset(10, 1).val.size() == 1);
    CHECK(split_dataset(100, 1).val.size() == 10);

    Split again = split_dataset(26040, 7);
    CHECK(s.train == again.train);
    CHECK(s.val == again.val);

    std::vector<int> seen(26040, 0);
    for (std::size_t i : s.train) seen[i]++;
    for (std::size_t i : s.val) seen[i]++;
    for (int count : seen) CHECK(count == 1);
}

TEST_CASE("split rejects fewer than 10 points") {
    CHECK_THROWS_AS(split_dataset(9, 1), DatasetError);
}

TEST_CASE("dataset JSONL round-trips") {
    std::vector<DataPoint> points = {point_with_runtime(100.0, "alpha"),
                                     point_with_runtime(250.0, "beta")};
    std::string path = "/tmp/paragraph_unit_dataset.jsonl";
    write_dataset_jsonl(path, points);
    auto back = read_dataset_jsonl(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].app_name == "alpha");
    CHECK(back[0].runtime_us == 100.0);
    CHECK(back[0].graph == points[0].graph);
    CHECK(back[1].variant_kind == VariantKind::Cpu);
}

TEST_CASE("dataset loader honors the exclusion list") {
    std::vector<DataPoint> points = {point_with_runtime(1.0, "keep"),
                                     point_with_runtime(2.0, "corrupted"),
                                     point_with_runtime(3.0, "keep")};
    std::string path = "/tmp/paragraph_unit_dataset_excl.jsonl";
    write_dataset_jsonl(path, points);
    auto back = read_dataset_jsonl(path, {"corrupted"});
    REQUIRE(back.size() == 2);
    for (const DataPoint& p : back) CHECK(p.app_name == "keep");
}

TEST_CASE("data points with non-positive runtime are rejected") {
    nlohmann::json doc = data_point_to_json(point_with_runtime(5.0));
    doc["runtime_us"] = 0.0;
    CHECK_THROWS_AS(data_point_from_json(doc), SchemaError);
}

TEST_CASE("measure_runtime parses the stub executor's marker") {
    ExecutorConfig cfg;
    cfg.compile_template = "true";
    cfg.run_template = "echo KERNEL_TIME_US=746846";
    cfg.timeout_s = 10;
    CHECK(measure_runtime("/dev/null", cfg) == 746846.0);
}

TEST_CASE("measure_runtime fails without a marker, never fabricates") {
    ExecutorConfig cfg;
    cfg.compile_template = "true";
    cfg.run_template = "echo no marker here";
    cfg.timeout_s = 10;
    try {
        measure_runtime("/dev/null", cfg);
        FAIL("expected MeasureError");
    } catch (const MeasureError& e) {
        CHECK(e.measure_kind() == MeasureError::Kind::Parse);
    }
}

TEST_CASE("measure_runtime rejects a zero marker value") {
    ExecutorConfig cfg;
    cfg.compile_template = "";
    cfg.run_template = "echo KERNEL_TIME_US=0";
    cfg.timeout_s = 10;
    try {
        measure_runtime("/dev/null", cfg);
        FAIL("expected MeasureError");
    } catch (const MeasureError& e) {
        CHECK(e.measure_kind() == MeasureError::Kind::Parse);
    }
}

TEST_CASE("measure_runtime reports compile failures with stderr") {
    ExecutorConfig cfg;
    cfg.compile_template = "sh -c 'echo broken >&2; exit 3'";
    cfg.run_template = "echo KERNEL_TIME_US=1";
    cfg.timeout_s = 10;
    try {
        measure_runtime("/dev/null", cfg);
        FAIL("expected MeasureError");
    } catch (const MeasureError& e) {
        CHECK(e.measure_kind() == MeasureError::Kind::Compile);
        CHECK(e.captured_stderr().find("broken") != std::string::npos);
    }
}

TEST_CASE("measure_runtime times out runaway commands") {
    ExecutorConfig cfg;
    cfg.compile_template = "";
    cfg.run_template = "sleep 30";
    cfg.timeout_s = 1;
    try {
        measure_runtime("/dev/null", cfg);
        FAIL("expected MeasureError");
    } catch (const MeasureError& e) {
        CHECK(e.measure_kind() == MeasureError::Kind::Timeout);
    }
}

TEST_CASE("measure_runtime retries per config") {
    // first attempt fails, second succeeds, using a scratch state file
    std::string state = "/tmp/paragraph_retry_state";
    std::remove(state.c_str());
    ExecutorConfig cfg;
    cfg.compile_template = "";
    cfg.run_template = "test -f " + state + " && echo KERNEL_TIME_US=7 || { touch " + state + "; false; }";
    cfg.timeout_s = 10;
    cfg.retries = 1;
    int attempts = 0;
    double v = measure_runtime("/dev/null", cfg, [&](const std::string&) { attempts++; });
    CHECK(v == 7.0);
    CHECK(attempts == 1);
    std::remove(state.c_str());
}

TEST_CASE("executor config validation") {
    nlohmann::json doc = {{"compile", "cc {file} -o {exe}"}, {"run", "{exe}"}, {"timeout_s", 0}};
    CHECK_THROWS_AS(executor_config_from_json(doc), SchemaError);
    doc["timeout_s"] = 5;
    ExecutorConfig cfg = executor_config_from_json(doc);
    CHECK(cfg.timeout_s == 5);
    CHECK_THROWS_AS(executor_config_from_json(nlohmann::json{{"compile", "x"}}), SchemaError);
}
