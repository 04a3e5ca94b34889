#include "ratekit/crossval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "ratekit/baselines.hpp"
#include "ratekit/rng.hpp"

namespace ratekit {

std::vector<std::size_t> FoldPlan::train_indices(int held_out) const {
    std::vector<std::size_t> out;
    for (int f = 0; f < k; ++f)
        if (f != held_out)
            out.insert(out.end(), folds[static_cast<std::size_t>(f)].begin(),
                       folds[static_cast<std::size_t>(f)].end());
    return out;
}

FoldPlan stratified_folds(std::span<const int> labels, int k, std::uint64_t seed) {
    if (k < 2) throw ConfigError("stratified_folds: k must be >= 2");
    if (static_cast<std::size_t>(k) > labels.size())
        throw ConfigError("stratified_folds: k exceeds the number of rows");

    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.folds.resize(static_cast<std::size_t>(k));
    Rng rng = Rng(seed).split(0x5f01d);
    for (auto& [cls, indices] : by_class) {
        if (indices.size() < static_cast<std::size_t>(k))
            plan.warnings.push_back("class " + std::string(class_name(target_to_class(cls))) +
                                    " has " + std::to_string(indices.size()) +
                                    " samples for " + std::to_string(k) +
                                    " folds; spreading best-effort");
        rng.shuffle(indices);
        for (std::size_t i = 0; i < indices.size(); ++i)
            plan.folds[i % static_cast<std::size_t>(k)].push_back(indices[i]);
    }
    return plan;
}

std::string_view model_kind_name(ModelKind kind) {
    switch (kind) {
    case ModelKind::ann_emb: return "ann_emb";
    case ModelKind::ann: return "ann";
    case ModelKind::linear: return "linear";
    case ModelKind::logistic: return "logistic";
    }
    return "?";
}

ModelKind parse_model_kind(std::string_view name) {
    if (name == "ann_emb") return ModelKind::ann_emb;
    if (name == "ann") return ModelKind::ann;
    if (name == "linear") return ModelKind::linear;
    if (name == "logistic") return ModelKind::logistic;
    throw ConfigError("unknown model kind: \"" + std::string(name) + "\"");
}

TextHandling text_handling_for(ModelKind kind) {
    return kind == ModelKind::ann_emb ? TextHandling::embed : TextHandling::onehot;
}

namespace {

std::vector<double> targets_as_reals(std::span<const int> labels) {
    return {labels.begin(), labels.end()};
}

struct FoldOutcome {
    FoldDetail detail;
    std::string error; // non-empty on failure
};

// Train/predict for one fold. `fold_seed` drives init, shuffling and the
// inner early-stopping split.
FoldDetail run_fold(const Dataset& data, ModelKind kind, const CrossValConfig& cfg, int fold,
                    const FoldPlan& plan) {
    FoldDetail detail;
    detail.test_indices = plan.folds[static_cast<std::size_t>(fold)];
    const auto train_idx = plan.train_indices(fold);

    const Dataset train_data = data.subset(train_idx);
    const Dataset test_data = data.subset(detail.test_indices);

    const auto pipeline =
        fit_pipeline(train_data, text_handling_for(kind), "fold" + std::to_string(fold));
    const FeatureMatrix x_test = transform(pipeline, test_data);

    const std::uint64_t fold_seed = cfg.seed ^ static_cast<std::uint64_t>(fold);

    std::vector<int> predicted;
    switch (kind) {
    case ModelKind::linear: {
        const FeatureMatrix x_train = transform(pipeline, train_data);
        const auto model = fit_linear(x_train.dense, targets_as_reals(train_data.labels));
        predicted = discretize_all(predict(model, x_test.dense));
        break;
    }
    case ModelKind::logistic: {
        const FeatureMatrix x_train = transform(pipeline, train_data);
        const auto model = fit_ovr_logistic(x_train.dense, train_data.labels, cfg.logistic_l2);
        predicted = predict_ovr(model, x_test.dense);
        break;
    }
    case ModelKind::ann:
    case ModelKind::ann_emb: {
        // Early stopping needs its own validation split, carved from the
        // training side only so the held-out fold stays unseen.
        const int k_inner = std::max(
            2, static_cast<int>(std::llround(1.0 / std::max(cfg.inner_val_fraction, 1e-9))));
        const FoldPlan inner =
            stratified_folds(train_data.labels, k_inner, fold_seed ^ 0x1a2b3c4dull);
        const auto& inner_val = inner.folds[0];
        const auto inner_train = inner.train_indices(0);
        for (const std::size_t rel : inner_val)
            detail.inner_val_indices.push_back(train_idx[rel]);

        const Dataset fit_data = train_data.subset(inner_train);
        const Dataset val_data = train_data.subset(inner_val);
        const FeatureMatrix x_fit = transform(pipeline, fit_data);
        const FeatureMatrix x_val = transform(pipeline, val_data);

        TrainConfig tc = cfg.train;
        tc.seed = fold_seed;
        Rng init_rng = Rng(fold_seed).split(0x1417);
        std::optional<std::pair<int, int>> text;
        if (pipeline.tokenizer)
            text = {{pipeline.tokenizer->vocab_size(), pipeline.tokenizer->max_len}};
        Network net = build_network(pipeline.n_dense(), text, tc.net, init_rng);
        train_model(net, x_fit, fit_data.labels, x_val, val_data.labels, tc);
        predicted = discretize_all(predict(net, x_test));
        break;
    }
    }

    detail.cm = confusion(test_data.labels, predicted, kNumClasses);
    detail.qwk = qwk(test_data.labels, predicted, kNumClasses);
    return detail;
}

} // namespace

EvalReport cross_validate(const Dataset& data, ModelKind kind, const CrossValConfig& cfg,
                          std::string config_fingerprint) {
    if (cfg.k < 2) throw ConfigError("cross_validate: k must be >= 2");
    const FoldPlan plan = stratified_folds(data.labels, cfg.k, cfg.seed);

    std::vector<FoldOutcome> outcomes(static_cast<std::size_t>(cfg.k));
    // Folds are independent; exceptions are carried out of the parallel
    // region by hand and rethrown in fold order.
#pragma omp parallel for schedule(dynamic)
    for (int fold = 0; fold < cfg.k; ++fold) {
        auto& slot = outcomes[static_cast<std::size_t>(fold)];
        try {
            slot.detail = run_fold(data, kind, cfg, fold, plan);
        } catch (const std::exception& e) {
            slot.error = e.what();
        } catch (...) {
            slot.error = "unknown error";
        }
    }
    for (int fold = 0; fold < cfg.k; ++fold) {
        const auto& slot = outcomes[static_cast<std::size_t>(fold)];
        if (!slot.error.empty())
            throw NumericError("cross_validate: model " + std::string(model_kind_name(kind)) +
                               ", fold " + std::to_string(fold) + " failed: " + slot.error);
    }

    EvalReport report;
    report.model = std::string(model_kind_name(kind));
    report.config_fingerprint = std::move(config_fingerprint);
    report.k = cfg.k;
    report.pooled = ConfusionMatrix(kNumClasses);
    for (auto& outcome : outcomes) {
        report.fold_qwk.push_back(outcome.detail.qwk);
        report.pooled += outcome.detail.cm;
        report.folds.push_back(std::move(outcome.detail));
    }
    report.metrics = class_metrics(report.pooled);

    const double mean = std::accumulate(report.fold_qwk.begin(), report.fold_qwk.end(), 0.0) /
                        static_cast<double>(cfg.k);
    double var = 0.0;
    for (const double q : report.fold_qwk) var += (q - mean) * (q - mean);
    report.qwk_mean = mean;
    report.qwk_std = cfg.k > 1 ? std::sqrt(var / static_cast<double>(cfg.k - 1)) : 0.0;
    return report;
}

nlohmann::json EvalReport::to_json() const {
    nlohmann::json per_class;
    per_class["classes"] = nlohmann::json::array();
    for (int c = 0; c < kNumClasses; ++c)
        per_class["classes"].push_back(std::string(class_name(target_to_class(c))));
    per_class["precision"] = metrics.precision;
    per_class["recall"] = metrics.recall;
    per_class["f1"] = metrics.f1;
    per_class["support"] = metrics.support;

    nlohmann::json cm = nlohmann::json::array();
    for (int t = 0; t < kNumClasses; ++t) {
        nlohmann::json row = nlohmann::json::array();
        for (int p = 0; p < kNumClasses; ++p) row.push_back(pooled.at(t, p));
        cm.push_back(row);
    }

    return {
        {"model", model},
        {"config_fingerprint", config_fingerprint},
        {"k", k},
        {"fold_qwk", fold_qwk},
        {"qwk_mean", qwk_mean},
        {"qwk_std_over_folds", qwk_std},
        {"confusion", cm},
        {"per_class", per_class},
    };
}

} // namespace ratekit
