#include "paragraph/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "paragraph/errors.hpp"

namespace paragraph {

namespace {

void check_inputs(const std::vector<double>& actual, const std::vector<double>& predicted) {
    if (actual.empty()) throw MetricError("empty input");
    if (actual.size() != predicted.size())
        throw MetricError("length mismatch: " + std::to_string(actual.size()) + " vs " +
                          std::to_string(predicted.size()));
}

double runtime_range_us(const std::vector<double>& actual) {
    auto [lo, hi] = std::minmax_element(actual.begin(), actual.end());
    return *hi - *lo;
}

}  // namespace

double rmse_ms(const std::vector<double>& actual_us, const std::vector<double>& predicted_us) {
    check_inputs(actual_us, predicted_us);
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < actual_us.size(); i++) {
        double d = actual_us[i] - predicted_us[i];
        sum_sq += d * d;
    }
    return std::sqrt(sum_sq / static_cast<double>(actual_us.size())) / 1000.0;
}

double normalized_rmse(const std::vector<double>& actual_us,
                       const std::vector<double>& predicted_us) {
    check_inputs(actual_us, predicted_us);
    double range = runtime_range_us(actual_us);
    if (range <= 0.0) throw MetricError("actual runtime range is zero");
    return rmse_ms(actual_us, predicted_us) * 1000.0 / range;
}

std::vector<ErrorBin> binned_relative_error(const std::vector<double>& actual_us,
                                            const std::vector<double>& predicted_us) {
    check_inputs(actual_us, predicted_us);
    double range = runtime_range_us(actual_us);
    if (range <= 0.0) throw MetricError("actual runtime range is zero");

    std::vector<ErrorBin> bins(kNumErrorBins);
    for (int k = 0; k < kNumErrorBins; k++) {
        bins[static_cast<std::size_t>(k)].lo_s = 10.0 * k;
        if (k + 1 < kNumErrorBins) bins[static_cast<std::size_t>(k)].hi_s = 10.0 * (k + 1);
    }
    for (std::size_t i = 0; i < actual_us.size(); i++) {
        double seconds = actual_us[i] / 1e6;
        int k = std::min(kNumErrorBins - 1, static_cast<int>(seconds / 10.0));
        double rel = std::abs(actual_us[i] - predicted_us[i]) / range;
        ErrorBin& bin = bins[static_cast<std::size_t>(k)];
        bin.mean_relative_error += rel;
        bin.max_relative_error = std::max(bin.max_relative_error, rel);
        bin.count++;
    }
    for (ErrorBin& bin : bins)
        if (bin.count > 0) bin.mean_relative_error /= static_cast<double>(bin.count);
    return bins;
}

std::map<std::string, double> per_application_error(const std::vector<DataPoint>& points,
                                                    const std::vector<double>& predicted_us) {
    if (points.size() != predicted_us.size())
        throw MetricError("points/predictions length mismatch");
    if (points.empty()) return {};
    std::vector<double> actual;
    actual.reserve(points.size());
    for (const DataPoint& p : points) actual.push_back(p.runtime_us);
    double range = runtime_range_us(actual);
    if (range <= 0.0) throw MetricError("actual runtime range is zero");

    std::map<std::string, std::pair<double, std::size_t>> sums;
    for (std::size_t i = 0; i < points.size(); i++) {
        double rel = std::abs(points[i].runtime_us - predicted_us[i]) / range;
        auto& [sum, count] = sums[points[i].app_name];
        sum += rel;
        count++;
    }
    std::map<std::string, double> out;
    for (const auto& [app, sc] : sums) out[app] = sc.first / static_cast<double>(sc.second);
    return out;
}

MetricReport compute_report(const std::vector<DataPoint>& points,
                            const std::vector<double>& predicted_us) {
    std::vector<double> actual;
    actual.reserve(points.size());
    for (const DataPoint& p : points) actual.push_back(p.runtime_us);
    MetricReport report;
    report.n = points.size();
    report.rmse_ms = rmse_ms(actual, predicted_us);
    report.norm_rmse = normalized_rmse(actual, predicted_us);
    report.bins = binned_relative_error(actual, predicted_us);
    report.per_app = per_application_error(points, predicted_us);
    return report;
}

nlohmann::json report_to_json(const MetricReport& report) {
    nlohmann::json bins = nlohmann::json::array();
    for (const ErrorBin& b : report.bins) {
        nlohmann::json jb;
        jb["lo_s"] = b.lo_s;
        if (b.hi_s) jb["hi_s"] = *b.hi_s;
        jb["mean_relative_error"] = b.mean_relative_error;
        jb["max_relative_error"] = b.max_relative_error;
        jb["count"] = b.count;
        bins.push_back(std::move(jb));
    }
    return {{"schema_version", 1},
            {"rmse_ms", report.rmse_ms},
            {"norm_rmse", report.norm_rmse},
            {"bins", std::move(bins)},
            {"per_app", report.per_app},
            {"n", report.n}};
}

MetricReport report_from_json(const nlohmann::json& doc) {
    MetricReport report;
    report.rmse_ms = doc.at("rmse_ms").get<double>();
    report.norm_rmse = doc.at("norm_rmse").get<double>();
    report.n = doc.at("n").get<std::size_t>();
    for (const auto& jb : doc.at("bins")) {
        ErrorBin b;
        b.lo_s = jb.at("lo_s").get<double>();
        if (jb.contains("hi_s")) b.hi_s = jb["hi_s"].get<double>();
        b.mean_relative_error = jb.at("mean_relative_error").get<double>();
        b.max_relative_error = jb.at("max_relative_error").get<double>();
        b.count = jb.at("count").get<std::size_t>();
        report.bins.push_back(b);
    }
    for (const auto& [app, v] : doc.at("per_app").items()) report.per_app[app] = v.get<double>();
    return report;
}

std::string report_to_csv(const MetricReport& report) {
    std::ostringstream out;
    out << "metric,key,value\n";
    out << "rmse_ms,," << report.rmse_ms << "\n";
    out << "norm_rmse,," << report.norm_rmse << "\n";
    out << "n,," << report.n << "\n";
    for (const ErrorBin& b : report.bins) {
        out << "bin_mean_relative_error," << b.lo_s << "," << b.mean_relative_error << "\n";
        out << "bin_count," << b.lo_s << "," << b.count << "\n";
    }
    for (const auto& [app, v] : report.per_app) out << "per_app," << app << "," << v << "\n";
    return out.str();
}

}  // namespace paragraph
