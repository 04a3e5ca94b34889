#include "ratekit/baselines.hpp"

#include <cmath>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ratekit {

namespace {

constexpr double kRidge = 1e-8;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

} // namespace

LinearModel fit_linear(const Matrix& x, std::span<const double> y) {
    const std::size_t n = x.rows(), d = x.cols();
    if (y.size() != n) throw DataError("fit_linear: row/target count mismatch");
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!std::isfinite(x.data()[i])) throw NumericError("fit_linear: non-finite feature value");
    for (double v : y)
        if (!std::isfinite(v)) throw NumericError("fit_linear: non-finite target value");

    // Normal equations over [X | 1], ridge on every diagonal entry.
    Matrix gram;
    kernels::matmul_tn(x, x, gram);
    Matrix a(d + 1, d + 1);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) a(i, j) = gram(i, j);
    for (std::size_t i = 0; i < d; ++i) {
        double col_sum = 0.0;
        for (std::size_t r = 0; r < n; ++r) col_sum += x(r, i);
        a(i, d) = col_sum;
        a(d, i) = col_sum;
    }
    a(d, d) = static_cast<double>(n);
    for (std::size_t i = 0; i <= d; ++i) a(i, i) += kRidge;

    std::vector<double> rhs(d + 1, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        const double* row = x.row(r);
        for (std::size_t i = 0; i < d; ++i) rhs[i] += row[i] * y[r];
        rhs[d] += y[r];
    }

    const auto solution = kernels::solve_spd(a, rhs);
    LinearModel model;
    model.weights.assign(solution.begin(), solution.begin() + static_cast<std::ptrdiff_t>(d));
    model.bias = solution[d];
    return model;
}

double predict(const LinearModel& model, const double* row, std::size_t n_features) {
    if (n_features != model.weights.size())
        throw DataError("linear predict: feature width mismatch");
    double acc = model.bias;
    for (std::size_t i = 0; i < n_features; ++i) acc += model.weights[i] * row[i];
    return acc;
}

std::vector<double> predict(const LinearModel& model, const Matrix& x) {
    std::vector<double> out(x.rows());
#ifdef _OPENMP
    const bool par = kernels::parallel_enabled() && !omp_in_parallel() && x.size() >= 64 * 1024;
#else
    const bool par = false;
#endif
#pragma omp parallel for schedule(static) if (par)
    for (std::int64_t r = 0; r < static_cast<std::int64_t>(x.rows()); ++r)
        out[static_cast<std::size_t>(r)] = predict(model, x.row(static_cast<std::size_t>(r)), x.cols());
    return out;
}

double rmse(std::span<const double> predictions, std::span<const double> targets) {
    if (predictions.size() != targets.size() || predictions.empty())
        throw DataError("rmse: length mismatch or empty input");
    double acc = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double d = predictions[i] - targets[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(predictions.size()));
}

double OvrLogisticModel::score(int cls, const double* row, std::size_t n_features) const {
    const auto& c = classifiers[static_cast<std::size_t>(cls)];
    if (!c.trained) return 0.0; // sigmoid(-inf): below every trained score
    double z = c.bias;
    for (std::size_t i = 0; i < n_features; ++i) z += c.weights[i] * row[i];
    return sigmoid(z);
}

OvrLogisticModel fit_ovr_logistic(const Matrix& x, std::span<const int> y, double l2) {
    const std::size_t n = x.rows(), d = x.cols();
    if (y.size() != n) throw DataError("fit_ovr_logistic: row/target count mismatch");
    int distinct = 0;
    std::array<std::size_t, kNumClasses> counts{};
    for (int label : y) {
        if (label < 0 || label >= kNumClasses)
            throw DataError("fit_ovr_logistic: label outside 0..8");
        if (counts[static_cast<std::size_t>(label)]++ == 0) ++distinct;
    }
    if (distinct < 2) throw DataError("fit_ovr_logistic: need at least 2 distinct labels");

    constexpr int kMaxIters = 2000;
    constexpr double kStep = 0.1;
    constexpr double kGradTol = 1e-6;

    OvrLogisticModel model;
    // The nine binary problems are independent.
#ifdef _OPENMP
    const bool par = kernels::parallel_enabled() && !omp_in_parallel();
#else
    const bool par = false;
#endif
#pragma omp parallel for schedule(dynamic) if (par)
    for (int cls = 0; cls < kNumClasses; ++cls) {
        auto& binary = model.classifiers[static_cast<std::size_t>(cls)];
        if (counts[static_cast<std::size_t>(cls)] == 0) continue; // absent: constant-negative

        std::vector<double> target(n);
        for (std::size_t r = 0; r < n; ++r) target[r] = y[r] == cls ? 1.0 : 0.0;

        std::vector<double> w(d, 0.0);
        double b = 0.0;
        std::vector<double> grad_w(d);
        const double inv_n = 1.0 / static_cast<double>(n);
        for (int iter = 0; iter < kMaxIters; ++iter) {
            std::fill(grad_w.begin(), grad_w.end(), 0.0);
            double grad_b = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                const double* row = x.row(r);
                double z = b;
                for (std::size_t i = 0; i < d; ++i) z += w[i] * row[i];
                const double err = sigmoid(z) - target[r];
                for (std::size_t i = 0; i < d; ++i) grad_w[i] += err * row[i];
                grad_b += err;
            }
            double grad_inf = std::abs(grad_b * inv_n);
            for (std::size_t i = 0; i < d; ++i) {
                grad_w[i] = grad_w[i] * inv_n + l2 * w[i];
                grad_inf = std::max(grad_inf, std::abs(grad_w[i]));
            }
            grad_b *= inv_n;
            if (grad_inf < kGradTol) break;
            for (std::size_t i = 0; i < d; ++i) w[i] -= kStep * grad_w[i];
            b -= kStep * grad_b;
        }
        binary.weights = std::move(w);
        binary.bias = b;
        binary.trained = true;
    }
    return model;
}

RatingClass predict_ovr(const OvrLogisticModel& model, std::span<const double> row) {
    int best = 0;
    double best_score = -1.0;
    for (int cls = 0; cls < kNumClasses; ++cls) {
        const double s = model.score(cls, row.data(), row.size());
        if (s > best_score) { // strict: ties keep the lower class index
            best_score = s;
            best = cls;
        }
    }
    return target_to_class(best);
}

std::vector<int> predict_ovr(const OvrLogisticModel& model, const Matrix& x) {
    std::vector<int> out(x.rows());
#ifdef _OPENMP
    const bool par = kernels::parallel_enabled() && !omp_in_parallel() && x.size() >= 64 * 1024;
#else
    const bool par = false;
#endif
#pragma omp parallel for schedule(static) if (par)
    for (std::int64_t r = 0; r < static_cast<std::int64_t>(x.rows()); ++r) {
        const std::span<const double> row(x.row(static_cast<std::size_t>(r)), x.cols());
        out[static_cast<std::size_t>(r)] = class_target(predict_ovr(model, row));
    }
    return out;
}

} // namespace ratekit
