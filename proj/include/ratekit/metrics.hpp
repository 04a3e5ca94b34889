#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ratekit/common.hpp"

namespace ratekit {

// Row = true class, column = predicted class.
struct ConfusionMatrix {
    int n_classes = 0;
    std::vector<std::int64_t> counts; // n_classes x n_classes, row-major

    ConfusionMatrix() = default;
    explicit ConfusionMatrix(int n) : n_classes(n), counts(static_cast<std::size_t>(n) * n, 0) {}

    std::int64_t& at(int true_cls, int pred_cls) {
        return counts[static_cast<std::size_t>(true_cls) * n_classes + pred_cls];
    }
    std::int64_t at(int true_cls, int pred_cls) const {
        return counts[static_cast<std::size_t>(true_cls) * n_classes + pred_cls];
    }

    std::int64_t total() const;
    std::int64_t trace() const;
    std::int64_t row_sum(int true_cls) const;
    std::int64_t col_sum(int pred_cls) const;

    ConfusionMatrix& operator+=(const ConfusionMatrix& other);
    bool operator==(const ConfusionMatrix&) const = default;
};

struct ClassMetrics {
    std::vector<double> precision;
    std::vector<double> recall;
    std::vector<double> f1;
    std::vector<std::int64_t> support; // true-class counts
};

// Quadratic weighted kappa: 1 - sum(w*O) / sum(w*E) with w_ij =
// (i-j)^2/(n-1)^2, O the observed count matrix and E the outer product of
// its marginals scaled to the same total. Result in [-1, 1].
//
// Degenerate case (both label vectors constant and identical): 1.0.
double qwk(std::span<const int> y_true, std::span<const int> y_pred, int n_classes);

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred, int n_classes);

// Per class c: TP = cm[c][c], FP = column sum - TP, FN = row sum - TP;
// any 0/0 is reported as 0.0.
ClassMetrics class_metrics(const ConfusionMatrix& cm);

} // namespace ratekit
