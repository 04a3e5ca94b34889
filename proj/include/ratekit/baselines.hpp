#pragma once

#include <array>
#include <span>
#include <vector>

#include "ratekit/domain.hpp"
#include "ratekit/kernels.hpp"

namespace ratekit {

struct LinearModel {
    std::vector<double> weights; // one per dense feature
    double bias = 0.0;
};

// Least squares on the 0-8 target via the normal equations with a small
// Tikhonov term (1e-8 on the diagonal) to absorb rank deficiency.
LinearModel fit_linear(const Matrix& x, std::span<const double> y);

double predict(const LinearModel& model, const double* row, std::size_t n_features);
std::vector<double> predict(const LinearModel& model, const Matrix& x);

double rmse(std::span<const double> predictions, std::span<const double> targets);

// One binary logistic classifier per rating class; prediction is the argmax
// of the per-class sigmoid scores (which need not sum to 1 and are never
// normalized). Classes absent from the training fold keep trained = false
// and score 0, below any trained classifier's sigmoid.
struct OvrLogisticModel {
    struct Binary {
        std::vector<double> weights;
        double bias = 0.0;
        bool trained = false;
    };
    std::array<Binary, kNumClasses> classifiers;

    double score(int cls, const double* row, std::size_t n_features) const;
};

// Per class: full-batch gradient descent on mean binary cross-entropy with
// L2 strength l2 (bias unpenalized), step 0.1, at most 2000 iterations,
// stopping when the gradient infinity-norm drops below 1e-6.
OvrLogisticModel fit_ovr_logistic(const Matrix& x, std::span<const int> y, double l2);

// Ties break toward the lower target index (the better rating).
RatingClass predict_ovr(const OvrLogisticModel& model, std::span<const double> row);
std::vector<int> predict_ovr(const OvrLogisticModel& model, const Matrix& x);

} // namespace ratekit
