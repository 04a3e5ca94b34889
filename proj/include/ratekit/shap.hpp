#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ratekit/baselines.hpp"
#include "ratekit/net.hpp"

namespace ratekit {

// Batch-in, scores-out model view used by the explainers.
using Predictor = std::function<std::vector<double>(const Batch&)>;

Predictor make_predictor(const Network& net);
Predictor make_predictor(const LinearModel& model);
// The logistic model is explained through its predicted class target.
Predictor make_predictor(const OvrLogisticModel& model);

// Additive attribution for one prediction: base_value + sum(phis) equals the
// prediction (exactly for enumeration, constraint-enforced for sampling).
struct ShapExplanation {
    double base_value = 0.0;
    std::vector<double> phis; // one per feature group
    double prediction = 0.0;
    std::vector<std::string> feature_names;
    std::vector<double> feature_values; // group representative value of the explained row
};

// Reference rows used to marginalize absent features; drawn from the
// training data of the same fold/pipeline.
Batch sample_background(const FeatureMatrix& features, std::span<const int> labels, int size,
                        std::uint64_t seed);

// Exact Shapley values by coalition enumeration over the feature groups
// (a one-hot block or token sequence toggles as one unit). Refuses more
// than 12 groups; use shap_kernel for those.
ShapExplanation shap_exact(const Predictor& model, const Batch& x, const Batch& background,
                           const std::vector<FeatureGroup>& groups);

// Kernel-weighted approximation: coalitions sampled from the Shapley kernel
// (enumerated exhaustively whenever the budget covers all of them; the full
// and empty coalitions always enter as constraints), then a weighted
// least-squares solve under the additivity constraint. Deterministic for a
// fixed seed.
ShapExplanation shap_kernel(const Predictor& model, const Batch& x, const Batch& background,
                            const std::vector<FeatureGroup>& groups, int n_samples,
                            std::uint64_t seed);

struct ForcePlotData {
    double base_value = 0.0;
    double prediction = 0.0;
    struct Arrow {
        std::string name;
        double phi = 0.0;     // sign = push direction
        double value = 0.0;   // feature value shown on the arrow
        bool operator==(const Arrow&) const = default;
    };
    std::vector<Arrow> arrows; // |phi| descending; exact zeros omitted

    nlohmann::json to_json() const;
    static ForcePlotData from_json(const nlohmann::json& j);
    bool operator==(const ForcePlotData&) const = default;
};

ForcePlotData force_plot_data(const ShapExplanation& e);

// Mean absolute Shapley value per feature, descending.
struct ImportanceTable {
    std::vector<std::string> features;
    std::vector<double> mean_abs_phi;
};

ImportanceTable importance(std::span<const ShapExplanation> explanations);

// Summary-plot source: per feature (importance order), one point per
// explanation pairing the Shapley value with the min-max normalized feature
// value (constant features sit at 0.5).
struct SummaryData {
    std::vector<std::string> features;
    std::vector<std::vector<std::pair<double, double>>> points; // (phi, normalized value)
};

SummaryData summary_plot_data(std::span<const ShapExplanation> explanations);

} // namespace ratekit
