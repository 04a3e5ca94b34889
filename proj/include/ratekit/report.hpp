#pragma once

#include <string>

#include "ratekit/metrics.hpp"
#include "ratekit/shap.hpp"

namespace ratekit {

// Confusion matrix as CSV: header row of predicted classes, one row per
// true class.
std::string confusion_csv(const ConfusionMatrix& cm);
// Blue-intensity heatmap with counts, true class on the left axis.
std::string confusion_svg(const ConfusionMatrix& cm, const std::string& title);

std::string importance_csv(const ImportanceTable& table);
// Horizontal bar chart, most important feature on top.
std::string importance_svg(const ImportanceTable& table, const std::string& title);

// One row per (explanation, feature): feature, phi, normalized value.
std::string summary_csv(const SummaryData& data);
// Beeswarm-style scatter: x = phi, row per feature, color by normalized value.
std::string summary_svg(const SummaryData& data, const std::string& title);

void write_text_file(const std::string& content, const std::string& path);

} // namespace ratekit
