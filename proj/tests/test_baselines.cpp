#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ratekit/baselines.hpp"
#include "ratekit/rng.hpp"

using namespace ratekit;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
    return m;
}

// Independent oracle: plain gradient descent on the squared-error objective,
// run to convergence. Deliberately shares no code with fit_linear.
void gd_least_squares(const Matrix& x, const std::vector<double>& y, std::vector<double>& w,
                      double& b) {
    const std::size_t n = x.rows(), d = x.cols();
    w.assign(d, 0.0);
    b = 0.0;
    const double lr = 0.02;
    for (int iter = 0; iter < 200000; ++iter) {
        std::vector<double> grad_w(d, 0.0);
        double grad_b = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            double pred = b;
            for (std::size_t i = 0; i < d; ++i) pred += w[i] * x(r, i);
            const double err = 2.0 * (pred - y[r]) / static_cast<double>(n);
            for (std::size_t i = 0; i < d; ++i) grad_w[i] += err * x(r, i);
            grad_b += err;
        }
        double inf = std::abs(grad_b);
        for (const double g : grad_w) inf = std::max(inf, std::abs(g));
        if (inf < 1e-10) break;
        for (std::size_t i = 0; i < d; ++i) w[i] -= lr * grad_w[i];
        b -= lr * grad_b;
    }
}

} // namespace

TEST_CASE("exact affine data is interpolated") {
    Rng rng(1);
    const Matrix x = random_matrix(40, 3, rng);
    std::vector<double> y(40);
    for (std::size_t r = 0; r < 40; ++r)
        y[r] = 1.5 * x(r, 0) - 2.0 * x(r, 1) + 0.25 * x(r, 2) + 3.0;
    const auto model = fit_linear(x, y);
    CHECK(model.weights[0] == doctest::Approx(1.5).epsilon(1e-6));
    CHECK(model.weights[1] == doctest::Approx(-2.0).epsilon(1e-6));
    CHECK(model.weights[2] == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(model.bias == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(rmse(predict(model, x), y) <= 1e-6);
}

TEST_CASE("an all-zero column gets weight zero under the ridge term") {
    Rng rng(2);
    Matrix x = random_matrix(30, 3, rng);
    for (std::size_t r = 0; r < 30; ++r) x(r, 1) = 0.0;
    std::vector<double> y(30);
    for (std::size_t r = 0; r < 30; ++r) y[r] = x(r, 0) + x(r, 2);
    const auto model = fit_linear(x, y);
    CHECK(model.weights[1] == 0.0);
}

TEST_CASE("normal equations agree with an independent gradient-descent minimizer") {
    Rng rng(3);
    const Matrix x = random_matrix(50, 3, rng);
    std::vector<double> y(50);
    for (std::size_t r = 0; r < 50; ++r)
        y[r] = 0.8 * x(r, 0) - 1.2 * x(r, 1) + 2.4 * x(r, 2) + 0.5 + 0.3 * rng.normal();
    const auto model = fit_linear(x, y);

    std::vector<double> w_oracle;
    double b_oracle = 0.0;
    gd_least_squares(x, y, w_oracle, b_oracle);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(model.weights[i] == doctest::Approx(w_oracle[i]).epsilon(1e-4));
    CHECK(model.bias == doctest::Approx(b_oracle).epsilon(1e-4));
}

TEST_CASE("residuals are orthogonal to every feature column") {
    Rng rng(4);
    const Matrix x = random_matrix(60, 4, rng);
    std::vector<double> y(60);
    for (std::size_t r = 0; r < 60; ++r) y[r] = x(r, 0) - x(r, 3) + rng.normal();
    const auto model = fit_linear(x, y);
    const auto preds = predict(model, x);
    for (std::size_t col = 0; col < 4; ++col) {
        double dot = 0.0;
        for (std::size_t r = 0; r < 60; ++r) dot += (preds[r] - y[r]) * x(r, col);
        CHECK(std::abs(dot) <= 1e-6);
    }
}

TEST_CASE("non-finite inputs are a numeric error") {
    Matrix x(2, 1);
    x(0, 0) = std::nan("");
    CHECK_THROWS_AS(fit_linear(x, std::vector<double>{1.0, 2.0}), NumericError);
}

TEST_CASE("rmse: examples") {
    CHECK(rmse(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, 2.0}) == 0.0);
    CHECK(rmse(std::vector<double>{2.0}, std::vector<double>{0.0}) == 2.0);
    CHECK(rmse(std::vector<double>{1.0, 3.0}, std::vector<double>{0.0, 1.0}) ==
          doctest::Approx(std::sqrt(2.5)).epsilon(1e-12));
    CHECK_THROWS_AS(rmse(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}), DataError);
}

TEST_CASE("well-separated clusters are classified perfectly") {
    Matrix x(20, 1);
    std::vector<int> y(20);
    for (std::size_t r = 0; r < 10; ++r) {
        x(r, 0) = -2.0 - static_cast<double>(r) * 0.1;
        y[r] = 0;
    }
    for (std::size_t r = 10; r < 20; ++r) {
        x(r, 0) = 2.0 + static_cast<double>(r - 10) * 0.1;
        y[r] = 1;
    }
    const auto model = fit_ovr_logistic(x, y, 1e-4);
    const auto preds = predict_ovr(model, x);
    for (std::size_t r = 0; r < 20; ++r) CHECK(preds[r] == y[r]);
}

TEST_CASE("scores stay in (0,1) for trained classes, 0 for absent classes") {
    Rng rng(5);
    const Matrix x = random_matrix(30, 2, rng);
    std::vector<int> y(30);
    for (std::size_t r = 0; r < 30; ++r) y[r] = r % 2 == 0 ? 2 : 5;
    const auto model = fit_ovr_logistic(x, y, 1e-4);

    for (std::size_t r = 0; r < 30; ++r) {
        for (const int cls : {2, 5}) {
            const double s = model.score(cls, x.row(r), 2);
            CHECK(s > 0.0);
            CHECK(s < 1.0);
        }
        // Absent classes score strictly below every trained classifier.
        for (const int cls : {0, 1, 3, 4, 6, 7, 8}) CHECK(model.score(cls, x.row(r), 2) == 0.0);
    }
    CHECK_FALSE(model.classifiers[0].trained);
    CHECK(model.classifiers[2].trained);
}

TEST_CASE("prediction is the argmax with ties to the better rating") {
    OvrLogisticModel model;
    // Craft constant-score classifiers via bias-only weights.
    auto set = [&](int cls, double logit) {
        auto& binary = model.classifiers[static_cast<std::size_t>(cls)];
        binary.weights = {0.0};
        binary.bias = logit;
        binary.trained = true;
    };
    set(2, std::log(0.2 / 0.8)); // sigmoid = 0.2
    set(5, std::log(0.7 / 0.3)); // 0.7
    set(6, std::log(0.1 / 0.9)); // 0.1
    const std::vector<double> row = {0.0};
    CHECK(predict_ovr(model, row) == RatingClass::B);

    // All equal scores: the lowest index (best rating) wins.
    OvrLogisticModel flat;
    for (int cls = 0; cls < kNumClasses; ++cls) {
        auto& binary = flat.classifiers[static_cast<std::size_t>(cls)];
        binary.weights = {0.0};
        binary.bias = 0.0;
        binary.trained = true;
    }
    CHECK(predict_ovr(flat, row) == RatingClass::Aaa);

    // A single trained class always wins.
    OvrLogisticModel single;
    single.classifiers[7].weights = {0.0};
    single.classifiers[7].bias = -5.0;
    single.classifiers[7].trained = true;
    CHECK(predict_ovr(single, row) == RatingClass::Ca);
}

TEST_CASE("argmax is invariant under a strictly increasing transform of all scores") {
    Rng rng(6);
    const Matrix x = random_matrix(25, 3, rng);
    std::vector<int> y(25);
    for (std::size_t r = 0; r < 25; ++r) y[r] = static_cast<int>(rng.uniform_int(3));
    const auto model = fit_ovr_logistic(x, y, 1e-3);

    for (std::size_t r = 0; r < 25; ++r) {
        std::array<double, kNumClasses> scores{};
        for (int cls = 0; cls < kNumClasses; ++cls) scores[static_cast<std::size_t>(cls)] =
            model.score(cls, x.row(r), 3);
        int argmax = 0;
        for (int cls = 1; cls < kNumClasses; ++cls)
            if (scores[static_cast<std::size_t>(cls)] > scores[static_cast<std::size_t>(argmax)])
                argmax = cls;
        // exp is strictly increasing; the argmax (and thus the prediction)
        // cannot move.
        int argmax_exp = 0;
        for (int cls = 1; cls < kNumClasses; ++cls)
            if (std::exp(scores[static_cast<std::size_t>(cls)]) >
                std::exp(scores[static_cast<std::size_t>(argmax_exp)]))
                argmax_exp = cls;
        CHECK(argmax == argmax_exp);
        CHECK(class_target(predict_ovr(model, std::span<const double>(x.row(r), 3))) == argmax);
    }
}

TEST_CASE("single-class input is rejected") {
    Matrix x(3, 1, 1.0);
    CHECK_THROWS_AS(fit_ovr_logistic(x, std::vector<int>{4, 4, 4}, 1e-3), DataError);
}
