#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(PARAGRAPH_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult res;
    std::array<char, 4096> buf;
    while (size_t n = fread(buf.data(), 1, buf.size(), pipe)) res.out.append(buf.data(), n);
    int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

std::string data_path(const std::string& name) {
    return std::string(PARAGRAPH_TEST_DATA_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("parse subcommand emits AST JSON") {
    RunResult r = run("parse " + data_path("fig2.c"));
    CHECK(r.exit_code == 0);
    auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["nodes"].size() == 27);
    CHECK(doc["root"] == 0);
}

TEST_CASE("graph subcommand is byte-stable across runs") {
    RunResult a = run("graph " + data_path("fig2.c") + " --threads 1 --teams 1");
    RunResult b = run("graph " + data_path("fig2.c") + " --threads 1 --teams 1");
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("\"edges\"") != std::string::npos);
}

TEST_CASE("graph subcommand honors --mode raw") {
    RunResult r = run("--json graph " + data_path("fig2.c") + " --threads 1 --teams 1 --mode raw");
    CHECK(r.exit_code == 0);
    auto doc = nlohmann::json::parse(r.out);
    for (const auto& e : doc["edges"]) {
        CHECK(e["type"] == 0);
        CHECK(e["w"] == 1.0);
    }
}

TEST_CASE("unknown flags exit 1") {
    RunResult r = run("graph --definitely-not-a-flag");
    CHECK(r.exit_code == 1);
}

TEST_CASE("missing input files exit 2") {
    RunResult r = run("parse /nonexistent/file.c");
    CHECK(r.exit_code == 2);
}

TEST_CASE("lex errors exit 2 with a machine-parsable record") {
    std::string bad = "/tmp/paragraph_cli_bad.c";
    std::ofstream(bad) << "int @;";
    std::string cmd = std::string(PARAGRAPH_CLI_PATH) + " parse " + bad + " 2>&1 1>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe);
    std::string err;
    std::array<char, 4096> buf;
    while (size_t n = fread(buf.data(), 1, buf.size(), pipe)) err.append(buf.data(), n);
    int status = pclose(pipe);
    CHECK(WEXITSTATUS(status) == 2);
    auto record = nlohmann::json::parse(err);
    CHECK(record["error"]["kind"] == "LexError");
}

TEST_CASE("variants then dataset build then predict wire together") {
    namespace fs = std::filesystem;
    std::string dir = "/tmp/paragraph_cli_flow";
    fs::remove_all(dir);
    fs::create_directories(dir);

    std::string kernels = PARAGRAPH_KERNELS_DIR;
    CHECK(run("variants " + kernels + "/vector_add.json --sizes 4,8,12,16 --teams 2 --threads 2,4 -o " +
              dir + "/v").exit_code == 0);
    CHECK(run("dataset build --variants " + dir + "/v --synthetic 5 -o " + dir + "/d.jsonl").exit_code == 0);

    std::string cfg = dir + "/train.json";
    std::ofstream(cfg) << R"({"epochs": 2, "batch": 8, "seed": 4, "hidden": 6, "head1": 8, "head2": 4, "feat_embed": 3})";
    CHECK(run("train " + dir + "/d.jsonl --config " + cfg + " -o " + dir + "/m.ckpt --curve " + dir +
              "/curve.json").exit_code == 0);

    CHECK(run("graph " + kernels + "/../tests/data/fig2.c --threads 2 --teams 2 -o " + dir + "/g.json")
              .exit_code == 0);
    RunResult pred = run("--json predict " + dir + "/m.ckpt " + dir + "/g.json --teams 4 --threads 2");
    CHECK(pred.exit_code == 0);
    auto doc = nlohmann::json::parse(pred.out);
    CHECK(doc.contains("predicted_ms"));

    RunResult eval = run("--json eval " + dir + "/m.ckpt " + dir + "/d.jsonl -o " + dir + "/report.json");
    CHECK(eval.exit_code == 0);
    CHECK(fs::exists(dir + "/report.json"));
}
