#include "ratekit/train.hpp"

#include <cmath>
#include <numeric>

#include "ratekit/metrics.hpp"

namespace ratekit {

void TrainConfig::validate() const {
    if (epochs_max < 1) throw ConfigError("train: epochs_max must be >= 1");
    if (lr <= 0.0) throw ConfigError("train: lr must be positive");
    if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
    if (patience < 1) throw ConfigError("train: patience must be >= 1");
    if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("train: momentum must be in [0, 1)");
}

nlohmann::json TrainConfig::to_json() const {
    return {
        {"epochs_max", epochs_max},
        {"lr", lr},
        {"batch_size", batch_size},
        {"momentum", momentum},
        {"patience", patience},
        {"seed", seed},
        {"hidden_layers", net.hidden_layers},
        {"hidden_units", net.hidden_units},
        {"dropout", net.dropout},
        {"spatial_dropout", net.spatial_dropout},
        {"embedding_dim", net.embedding_dim},
    };
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
    TrainConfig cfg;
    try {
        cfg.epochs_max = j.value("epochs_max", cfg.epochs_max);
        cfg.lr = j.value("lr", cfg.lr);
        cfg.batch_size = j.value("batch_size", cfg.batch_size);
        cfg.momentum = j.value("momentum", cfg.momentum);
        cfg.patience = j.value("patience", cfg.patience);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.net.hidden_layers = j.value("hidden_layers", cfg.net.hidden_layers);
        cfg.net.hidden_units = j.value("hidden_units", cfg.net.hidden_units);
        cfg.net.dropout = j.value("dropout", cfg.net.dropout);
        cfg.net.spatial_dropout = j.value("spatial_dropout", cfg.net.spatial_dropout);
        cfg.net.embedding_dim = j.value("embedding_dim", cfg.net.embedding_dim);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("train config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

bool EarlyStopper::observe(double metric) {
    ++epoch_;
    if (metric > best_metric_) {
        best_metric_ = metric;
        best_epoch_ = epoch_;
        since_best_ = 0;
        improved_last_ = true;
        return false;
    }
    improved_last_ = false;
    return ++since_best_ >= patience_;
}

nlohmann::json TrainReport::to_json() const {
    nlohmann::json hist = nlohmann::json::array();
    for (const auto& e : history)
        hist.push_back({{"train_mse", e.train_mse}, {"val_qwk", e.val_qwk}});
    return {
        {"epochs_run", epochs_run},
        {"best_epoch", best_epoch},
        {"stopped_early", stopped_early},
        {"history", hist},
    };
}

double mse_against_targets(std::span<const double> predictions, std::span<const int> targets) {
    if (predictions.size() != targets.size() || predictions.empty())
        throw DataError("mse: prediction/target length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double d = predictions[i] - static_cast<double>(targets[i]);
        acc += d * d;
    }
    return acc / static_cast<double>(predictions.size());
}

std::vector<int> discretize_all(std::span<const double> scores) {
    std::vector<int> out;
    out.reserve(scores.size());
    for (double s : scores) out.push_back(class_target(discretize(s)));
    return out;
}

TrainReport train_model(Network& net, const FeatureMatrix& train_x, std::span<const int> train_y,
                        const FeatureMatrix& val_x, std::span<const int> val_y,
                        const TrainConfig& cfg) {
    cfg.validate();
    if (val_x.n_rows() == 0 || val_y.empty())
        throw ConfigError("train: validation set is empty");
    if (train_x.n_rows() != train_y.size() || val_x.n_rows() != val_y.size())
        throw DataError("train: feature/target row counts disagree");

    const std::size_t n = train_x.n_rows();
    const auto batch_size = static_cast<std::size_t>(cfg.batch_size);

    Rng root(cfg.seed);
    Rng shuffle_rng = root.split(1);
    Rng dropout_rng = root.split(2);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    EarlyStopper stopper(cfg.patience);
    Network best = net;
    Gradients velocity;

    TrainReport report;
    for (int epoch = 1; epoch <= cfg.epochs_max; ++epoch) {
        shuffle_rng.shuffle(order);

        double squared_error_sum = 0.0;
        for (std::size_t start = 0; start < n; start += batch_size) {
            const std::size_t end = std::min(start + batch_size, n);
            const std::span<const std::size_t> rows(order.data() + start, end - start);
            const Batch batch = gather(train_x, rows);

            ForwardTrace trace;
            const auto preds = forward(net, batch, Mode::train, &dropout_rng, &trace);

            const auto m = static_cast<double>(rows.size());
            std::vector<double> d_pred(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i) {
                const double diff = preds[i] - static_cast<double>(train_y[rows[i]]);
                squared_error_sum += diff * diff;
                d_pred[i] = 2.0 * diff / m;
            }
            if (!std::isfinite(squared_error_sum))
                throw NumericError("training aborted: non-finite loss at epoch " +
                                   std::to_string(epoch));

            const Gradients grads = backward(net, trace, d_pred);
            try {
                sgd_step(net, grads, cfg.lr, cfg.momentum, &velocity);
            } catch (const NumericError& e) {
                throw NumericError("training aborted at epoch " + std::to_string(epoch) + ": " +
                                   e.what());
            }
        }

        const auto val_preds = predict(net, val_x);
        const double val_qwk = qwk(val_y, discretize_all(val_preds), kNumClasses);
        report.history.push_back({squared_error_sum / static_cast<double>(n), val_qwk});

        const bool stop = stopper.observe(val_qwk);
        if (stopper.improved_last()) best = net;
        report.epochs_run = epoch;
        if (stop) {
            report.stopped_early = true;
            break;
        }
    }

    report.best_epoch = stopper.best_epoch();
    net = std::move(best);
    return report;
}

} // namespace ratekit
