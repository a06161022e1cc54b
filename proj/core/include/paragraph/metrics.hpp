#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "paragraph/dataset.hpp"

namespace paragraph {

/// Root mean squared error; inputs in microseconds, result in
/// milliseconds. Throws MetricError on empty or mismatched inputs.
double rmse_ms(const std::vector<double>& actual_us, const std::vector<double>& predicted_us);

/// RMSE divided by the actual-runtime range; unitless.
/// Throws MetricError when max(actual) == min(actual).
double normalized_rmse(const std::vector<double>& actual_us,
                       const std::vector<double>& predicted_us);

/// One 10-second bin of relative error (absolute error over the
/// actual-runtime range). The last bin is open-ended (no hi_s).
struct ErrorBin {
    double lo_s = 0.0;
    std::optional<double> hi_s;
    double mean_relative_error = 0.0;
    double max_relative_error = 0.0;
    std::size_t count = 0;
};

inline constexpr int kNumErrorBins = 11;

/// Points land in [10k s, 10(k+1) s) by actual runtime, k = 0..9, plus an
/// open final bin; all 11 bins are reported, empty ones with count 0.
std::vector<ErrorBin> binned_relative_error(const std::vector<double>& actual_us,
                                            const std::vector<double>& predicted_us);

/// Mean relative error grouped by app_name.
std::map<std::string, double> per_application_error(const std::vector<DataPoint>& points,
                                                    const std::vector<double>& predicted_us);

struct MetricReport {
    double rmse_ms = 0.0;
    double norm_rmse = 0.0;
    std::vector<ErrorBin> bins;
    std::map<std::string, double> per_app;
    std::size_t n = 0;
};

MetricReport compute_report(const std::vector<DataPoint>& points,
                            const std::vector<double>& predicted_us);

nlohmann::json report_to_json(const MetricReport& report);
MetricReport report_from_json(const nlohmann::json& doc);
std::string report_to_csv(const MetricReport& report);

}  // namespace paragraph
