#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "ratekit/net.hpp"

namespace ratekit {

struct TrainConfig {
    int epochs_max = 150;
    double lr = 0.01;
    int batch_size = 32;
    double momentum = 0.0;
    int patience = 15;
    std::uint64_t seed = 0;
    NetConfig net;

    void validate() const; // throws ConfigError

    nlohmann::json to_json() const;
    static TrainConfig from_json(const nlohmann::json& j);
};

// Patience-based stopping on a metric where larger is better. Epochs are
// 1-based; only strict improvement resets the counter.
class EarlyStopper {
public:
    explicit EarlyStopper(int patience) : patience_(patience) {}

    // Returns true when training should stop after this epoch.
    bool observe(double metric);

    int best_epoch() const { return best_epoch_; }
    double best_metric() const { return best_metric_; }
    bool improved_last() const { return improved_last_; }

private:
    int patience_;
    int epoch_ = 0;
    int best_epoch_ = 0;
    double best_metric_ = -1e300;
    int since_best_ = 0;
    bool improved_last_ = false;
};

struct EpochStats {
    double train_mse = 0.0;
    double val_qwk = 0.0;
};

struct TrainReport {
    int epochs_run = 0;
    int best_epoch = 0;
    std::vector<EpochStats> history;
    bool stopped_early = false;

    nlohmann::json to_json() const;
};

// Mini-batch SGD on mean squared error against the 0-8 targets, shuffling
// each epoch, with early stopping on validation QWK of the discretized
// predictions. On return `net` holds the best-epoch weights, not the last.
TrainReport train_model(Network& net, const FeatureMatrix& train_x, std::span<const int> train_y,
                        const FeatureMatrix& val_x, std::span<const int> val_y,
                        const TrainConfig& cfg);

// Mean squared error of continuous predictions against integer class targets.
double mse_against_targets(std::span<const double> predictions, std::span<const int> targets);

// Discretize continuous scores to class targets.
std::vector<int> discretize_all(std::span<const double> scores);

} // namespace ratekit
