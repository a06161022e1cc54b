#include <doctest.h>

#include <cmath>

#include "paragraph/errors.hpp"
#include "paragraph/graph_build.hpp"
#include "paragraph/metrics.hpp"
#include "paragraph/parser.hpp"
#include "paragraph/rng.hpp"

using namespace paragraph;

namespace {

// independent two-pass evaluation of the same formula
double rmse_oracle_ms(const std::vector<double>& a, const std::vector<double>& p) {
    double mean_sq = 0.0;
    for (std::size_t i = 0; i < a.size(); i++) mean_sq += (a[i] - p[i]) * (a[i] - p[i]);
    mean_sq /= static_cast<double>(a.size());
    return std::sqrt(mean_sq) / 1000.0;
}

DataPoint named_point(const std::string& app, double us) {
    static ParaGraph g = [] {
        Ast ast = parse_source("void f() { int x; x = 1; }");
        return build_paragraph(ast, {}, 1, 1, GraphMode::Paragraph);
    }();
    DataPoint p;
    p.graph = g;
    p.app_name = app;
    p.runtime_us = us;
    return p;
}

}  // namespace

TEST_CASE("rmse trivials") {
    CHECK(rmse_ms({5.0, 10.0}, {5.0, 10.0}) == 0.0);
    CHECK(rmse_ms({0.0, 0.0}, {1000.0, 1000.0}) == 1.0);  // constant 1000 us error = 1 ms
}

TEST_CASE("rmse errors on empty or mismatched input") {
    CHECK_THROWS_AS(rmse_ms({}, {}), MetricError);
    CHECK_THROWS_AS(rmse_ms({1.0}, {1.0, 2.0}), MetricError);
}

TEST_CASE("rmse matches the independent formula on random vectors") {
    Rng rng(2024);
    std::vector<double> a(100), p(100);
    for (int i = 0; i < 100; i++) {
        a[static_cast<std::size_t>(i)] = rng.uniform(10.0, 1e7);
        p[static_cast<std::size_t>(i)] = rng.uniform(10.0, 1e7);
    }
    double got = rmse_ms(a, p);
    double want = rmse_oracle_ms(a, p);
    CHECK(std::abs(got - want) <= 1e-12 * std::max(got, want));
}

TEST_CASE("rmse scale equivariance and normalized_rmse scale invariance") {
    Rng rng(9);
    std::vector<double> a(40), p(40);
    for (int i = 0; i < 40; i++) {
        a[static_cast<std::size_t>(i)] = rng.uniform(1.0, 1e6);
        p[static_cast<std::size_t>(i)] = rng.uniform(1.0, 1e6);
    }
    double c = 3.5;
    std::vector<double> ca = a, cp = p;
    for (auto& x : ca) x *= c;
    for (auto& x : cp) x *= c;
    CHECK(rmse_ms(ca, cp) == doctest::Approx(c * rmse_ms(a, p)).epsilon(1e-12));
    CHECK(normalized_rmse(ca, cp) == doctest::Approx(normalized_rmse(a, p)).epsilon(1e-12));
}

TEST_CASE("normalized rmse trivials and hand case") {
    CHECK(normalized_rmse({0.0, 10000.0}, {0.0, 10000.0}) == 0.0);
    // actual {0, 10000}, predicted {5000, 5000}: rmse = 5000 us, range 10000 -> 0.5
    CHECK(normalized_rmse({0.0, 10000.0}, {5000.0, 5000.0}) == doctest::Approx(0.5));
    CHECK_THROWS_AS(normalized_rmse({5.0, 5.0}, {1.0, 2.0}), MetricError);
}

TEST_CASE("bins: all points under 10 s populate only the first bin") {
    std::vector<double> a = {1e6, 5e6, 9e6};      // 1, 5, 9 seconds
    std::vector<double> p = {1.1e6, 5e6, 8.5e6};
    auto bins = binned_relative_error(a, p);
    REQUIRE(bins.size() == kNumErrorBins);
    CHECK(bins[0].count == 3);
    for (std::size_t k = 1; k < bins.size(); k++) CHECK(bins[k].count == 0);
    CHECK(!bins.back().hi_s.has_value());
    CHECK(bins.back().lo_s == 100.0);
}

TEST_CASE("bins: a point at exactly 10 s lands in the second bin") {
    std::vector<double> a = {1e6, 10e6};
    std::vector<double> p = {1e6, 10e6};
    auto bins = binned_relative_error(a, p);
    CHECK(bins[0].count == 1);
    CHECK(bins[1].count == 1);
}

TEST_CASE("bins: a 0-110 s span populates all 11 bins and counts sum to n") {
    std::vector<double> a, p;
    for (int s = 0; s < 110; s += 5) {
        a.push_back(s * 1e6 + 1.0);
        p.push_back(s * 1e6 + 2000.0);
    }
    auto bins = binned_relative_error(a, p);
    std::size_t total = 0;
    for (const auto& b : bins) {
        CHECK(b.count > 0);
        total += b.count;
    }
    CHECK(total == a.size());
}

TEST_CASE("per-application error groups by app") {
    std::vector<DataPoint> points = {named_point("alpha", 0.0), named_point("alpha", 100.0),
                                     named_point("beta", 50.0)};
    points[0].runtime_us = 1.0;  // runtime must stay positive
    std::vector<double> preds = {11.0, 90.0, 60.0};
    auto per_app = per_application_error(points, preds);
    REQUIRE(per_app.size() == 2);
    double range = 99.0;
    CHECK(per_app["alpha"] == doctest::Approx((10.0 / range + 10.0 / range) / 2.0));
    CHECK(per_app["beta"] == doctest::Approx(10.0 / range));
}

TEST_CASE("one app equals the overall mean relative error") {
    std::vector<DataPoint> points = {named_point("only", 10.0), named_point("only", 1000.0)};
    std::vector<double> preds = {20.0, 900.0};
    auto per_app = per_application_error(points, preds);
    double range = 990.0;
    CHECK(per_app["only"] == doctest::Approx((10.0 / range + 100.0 / range) / 2.0));
}

TEST_CASE("excluded apps never reach the report") {
    std::vector<DataPoint> points = {named_point("keep", 10.0), named_point("keep", 500.0)};
    std::vector<double> preds = {12.0, 480.0};
    MetricReport report = compute_report(points, preds);
    CHECK(report.per_app.size() == 1);
    CHECK(report.per_app.count("keep") == 1);
}

TEST_CASE("report round-trips through JSON and is input-order stable") {
    std::vector<DataPoint> points = {named_point("a", 1.0), named_point("b", 2e7),
                                     named_point("a", 3e6)};
    std::vector<double> preds = {5.0, 1.9e7, 3.3e6};
    MetricReport report = compute_report(points, preds);
    MetricReport back = report_from_json(report_to_json(report));
    CHECK(report_to_json(back) == report_to_json(report));

    // permuted input gives the same report content
    std::vector<DataPoint> perm = {points[2], points[0], points[1]};
    std::vector<double> perm_preds = {preds[2], preds[0], preds[1]};
    MetricReport report2 = compute_report(perm, perm_preds);
    CHECK(report2.rmse_ms == doctest::Approx(report.rmse_ms).epsilon(1e-15));
    CHECK(report_to_json(report2)["per_app"] == report_to_json(report)["per_app"]);
}

TEST_CASE("csv rendering includes the headline metrics") {
    MetricReport report = compute_report({named_point("a", 10.0), named_point("a", 2000.0)},
                                         {12.0, 1800.0});
    std::string csv = report_to_csv(report);
    CHECK(csv.find("rmse_ms") != std::string::npos);
    CHECK(csv.find("per_app,a,") != std::string::npos);
}
