#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ratekit/dataset.hpp"
#include "ratekit/metrics.hpp"
#include "ratekit/preprocess.hpp"
#include "ratekit/train.hpp"

namespace ratekit {

// Partition of row indices into K stratified folds: within each class,
// indices are shuffled with the seeded generator and dealt round-robin, so
// per-class counts across folds differ by at most one.
struct FoldPlan {
    int k = 0;
    std::uint64_t seed = 0;
    std::vector<std::vector<std::size_t>> folds;
    std::vector<std::string> warnings; // classes spread best-effort (< k samples)

    std::vector<std::size_t> train_indices(int held_out) const;
};

FoldPlan stratified_folds(std::span<const int> labels, int k, std::uint64_t seed);

enum class ModelKind { ann_emb, ann, linear, logistic };

std::string_view model_kind_name(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

// ann_emb feeds the text column through the embedding branch; every other
// model sees it one-hot encoded.
TextHandling text_handling_for(ModelKind kind);

struct CrossValConfig {
    int k = 5;
    std::uint64_t seed = 0;
    TrainConfig train;               // ann / ann_emb settings
    double inner_val_fraction = 0.2; // early-stopping split, carved from the training side
    double logistic_l2 = 1e-3;
};

struct FoldDetail {
    std::vector<std::size_t> test_indices;
    std::vector<std::size_t> inner_val_indices; // absolute; empty for baselines
    double qwk = 0.0;
    ConfusionMatrix cm;
};

struct EvalReport {
    std::string model;
    std::string config_fingerprint;
    int k = 0;
    std::vector<double> fold_qwk;
    double qwk_mean = 0.0;
    double qwk_std = 0.0; // sample standard deviation over folds
    ConfusionMatrix pooled;
    ClassMetrics metrics;
    std::vector<FoldDetail> folds; // in-memory diagnostics, not serialized

    nlohmann::json to_json() const;
};

// K-fold protocol: per fold, fit the pipeline on the union of the K-1
// training folds, transform both sides, fit the model (networks early-stop
// on a stratified inner split of the training side), predict the held-out
// fold, and pool metrics over folds. Folds run in parallel; results merge
// in fold order.
EvalReport cross_validate(const Dataset& data, ModelKind kind, const CrossValConfig& cfg,
                          std::string config_fingerprint = "");

} // namespace ratekit
