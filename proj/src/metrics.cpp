#include "ratekit/metrics.hpp"

#include <numeric>
#include <string>

namespace ratekit {

std::int64_t ConfusionMatrix::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

std::int64_t ConfusionMatrix::trace() const {
    std::int64_t t = 0;
    for (int c = 0; c < n_classes; ++c) t += at(c, c);
    return t;
}

std::int64_t ConfusionMatrix::row_sum(int true_cls) const {
    std::int64_t s = 0;
    for (int p = 0; p < n_classes; ++p) s += at(true_cls, p);
    return s;
}

std::int64_t ConfusionMatrix::col_sum(int pred_cls) const {
    std::int64_t s = 0;
    for (int t = 0; t < n_classes; ++t) s += at(t, pred_cls);
    return s;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
    if (n_classes != other.n_classes)
        throw StateError("confusion matrices of different sizes cannot be merged");
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
    return *this;
}

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred, int n_classes) {
    if (y_true.size() != y_pred.size())
        throw DataError("confusion: label vectors have different lengths");
    ConfusionMatrix cm(n_classes);
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const int t = y_true[i], p = y_pred[i];
        if (t < 0 || t >= n_classes || p < 0 || p >= n_classes)
            throw DataError("confusion: label out of range at position " + std::to_string(i));
        ++cm.at(t, p);
    }
    return cm;
}

double qwk(std::span<const int> y_true, std::span<const int> y_pred, int n_classes) {
    if (y_true.empty()) throw DataError("qwk: empty label vectors");
    const ConfusionMatrix observed = confusion(y_true, y_pred, n_classes);
    const auto total = static_cast<double>(observed.total());
    const double denom_w = static_cast<double>(n_classes - 1) * (n_classes - 1);

    double weighted_observed = 0.0;
    double weighted_expected = 0.0;
    for (int i = 0; i < n_classes; ++i) {
        const auto row_marginal = static_cast<double>(observed.row_sum(i));
        for (int j = 0; j < n_classes; ++j) {
            const double w = n_classes > 1 ? static_cast<double>(i - j) * (i - j) / denom_w : 0.0;
            if (w == 0.0) continue;
            weighted_observed += w * static_cast<double>(observed.at(i, j));
            weighted_expected += w * row_marginal * static_cast<double>(observed.col_sum(j)) / total;
        }
    }
    if (weighted_expected == 0.0) {
        // Both raters constant: perfect agreement iff all mass is diagonal.
        if (observed.trace() == observed.total()) return 1.0;
        throw NumericError("qwk undefined: zero expected disagreement with off-diagonal counts");
    }
    return 1.0 - weighted_observed / weighted_expected;
}

ClassMetrics class_metrics(const ConfusionMatrix& cm) {
    ClassMetrics m;
    const int n = cm.n_classes;
    m.precision.resize(static_cast<std::size_t>(n));
    m.recall.resize(static_cast<std::size_t>(n));
    m.f1.resize(static_cast<std::size_t>(n));
    m.support.resize(static_cast<std::size_t>(n));
    for (int c = 0; c < n; ++c) {
        const auto i = static_cast<std::size_t>(c);
        const double tp = static_cast<double>(cm.at(c, c));
        const double fp = static_cast<double>(cm.col_sum(c)) - tp;
        const double fn = static_cast<double>(cm.row_sum(c)) - tp;
        m.support[i] = cm.row_sum(c);
        m.precision[i] = tp + fp > 0.0 ? tp / (tp + fp) : 0.0;
        m.recall[i] = tp + fn > 0.0 ? tp / (tp + fn) : 0.0;
        m.f1[i] = tp + 0.5 * (fp + fn) > 0.0 ? tp / (tp + 0.5 * (fp + fn)) : 0.0;
    }
    return m;
}

} // namespace ratekit
