#include "ratekit/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ratekit::kernels {

namespace {

std::atomic<bool> g_parallel_enabled{true};

// Below this many multiply-adds the fork/join overhead dominates.
constexpr std::size_t kParallelFlopThreshold = 64 * 1024;

bool in_parallel_region() {
#ifdef _OPENMP
    return omp_in_parallel() != 0;
#else
    return false;
#endif
}

bool use_parallel(Exec exec, std::size_t flops) {
#ifndef _OPENMP
    (void)exec;
    (void)flops;
    return false;
#else
    switch (exec) {
    case Exec::Serial: return false;
    case Exec::Parallel: return !in_parallel_region();
    case Exec::Auto:
        return g_parallel_enabled.load(std::memory_order_relaxed) && !in_parallel_region() &&
               flops >= kParallelFlopThreshold;
    }
    return false;
#endif
}

inline double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

} // namespace

void set_parallel_enabled(bool enabled) {
    g_parallel_enabled.store(enabled, std::memory_order_relaxed);
}

bool parallel_enabled() { return g_parallel_enabled.load(std::memory_order_relaxed); }

void matmul_nn(const Matrix& a, const Matrix& b, Matrix& c, Exec exec) {
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    if (b.rows() != k) throw NumericError("matmul_nn: inner dimensions disagree");
    c = Matrix(m, n);
    const bool par = use_parallel(exec, m * n * k);
    // Row-by-row; the inner k-loop runs in the same order on both paths.
#pragma omp parallel for schedule(static) if (par)
    for (std::int64_t r = 0; r < static_cast<std::int64_t>(m); ++r) {
        const double* arow = a.row(static_cast<std::size_t>(r));
        double* crow = c.row(static_cast<std::size_t>(r));
        for (std::size_t i = 0; i < k; ++i) {
            const double av = arow[i];
            if (av == 0.0) continue;
            const double* brow = b.row(i);
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void matmul_nt(const Matrix& a, const Matrix& b, Matrix& c, Exec exec) {
    const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
    if (b.cols() != k) throw NumericError("matmul_nt: inner dimensions disagree");
    c = Matrix(m, n);
    const bool par = use_parallel(exec, m * n * k);
#pragma omp parallel for schedule(static) if (par)
    for (std::int64_t r = 0; r < static_cast<std::int64_t>(m); ++r) {
        const double* arow = a.row(static_cast<std::size_t>(r));
        double* crow = c.row(static_cast<std::size_t>(r));
        for (std::size_t j = 0; j < n; ++j) crow[j] = dot(arow, b.row(j), k);
    }
}

void matmul_tn(const Matrix& a, const Matrix& b, Matrix& c, Exec exec) {
    const std::size_t k = a.rows(), m = a.cols(), n = b.cols();
    if (b.rows() != k) throw NumericError("matmul_tn: inner dimensions disagree");
    c = Matrix(m, n);
    const bool par = use_parallel(exec, m * n * k);
    // Each output element is a serial sum over the k rows.
#pragma omp parallel for schedule(static) if (par)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(m); ++i) {
        double* crow = c.row(static_cast<std::size_t>(i));
        for (std::size_t r = 0; r < k; ++r) {
            const double av = a(r, static_cast<std::size_t>(i));
            if (av == 0.0) continue;
            const double* brow = b.row(r);
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void dense_forward(const Matrix& x, const Matrix& w, const std::vector<double>& b, Matrix& y,
                   Exec exec) {
    const std::size_t n = x.rows(), in = x.cols(), out = w.rows();
    if (w.cols() != in) throw NumericError("dense_forward: weight/input shape mismatch");
    if (b.size() != out) throw NumericError("dense_forward: bias/output shape mismatch");
    y = Matrix(n, out);
    const bool par = use_parallel(exec, n * in * out);
#pragma omp parallel for schedule(static) if (par)
    for (std::int64_t r = 0; r < static_cast<std::int64_t>(n); ++r) {
        const double* xrow = x.row(static_cast<std::size_t>(r));
        double* yrow = y.row(static_cast<std::size_t>(r));
        for (std::size_t o = 0; o < out; ++o) yrow[o] = dot(xrow, w.row(o), in) + b[o];
    }
}

void dense_backward_input(const Matrix& dy, const Matrix& w, Matrix& dx, Exec exec) {
    matmul_nn(dy, w, dx, exec);
}

void dense_backward_params(const Matrix& x, const Matrix& dy, Matrix& dw, std::vector<double>& db,
                           Exec exec) {
    const std::size_t n = x.rows(), in = x.cols(), out = dy.cols();
    if (dy.rows() != n) throw NumericError("dense_backward_params: batch sizes disagree");
    dw = Matrix(out, in);
    db.assign(out, 0.0);
    const bool par = use_parallel(exec, n * in * out);
    // Parallel over output units: each (o, i) weight gradient and each db[o]
    // is one serial sum over the batch.
#pragma omp parallel for schedule(static) if (par)
    for (std::int64_t o = 0; o < static_cast<std::int64_t>(out); ++o) {
        double* dwrow = dw.row(static_cast<std::size_t>(o));
        double bias_acc = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double g = dy(r, static_cast<std::size_t>(o));
            bias_acc += g;
            if (g == 0.0) continue;
            const double* xrow = x.row(r);
            for (std::size_t i = 0; i < in; ++i) dwrow[i] += g * xrow[i];
        }
        db[static_cast<std::size_t>(o)] = bias_acc;
    }
}

std::vector<double> solve_spd(const Matrix& a, const std::vector<double>& rhs) {
    const std::size_t n = a.rows();
    if (a.cols() != n || rhs.size() != n) throw NumericError("solve_spd: shape mismatch");
    Matrix l(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (i == j) {
                if (s <= 0.0 || !std::isfinite(s))
                    throw NumericError("solve_spd: matrix is not positive definite");
                l(i, i) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    // Forward then backward substitution.
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = rhs[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
        y[i] = s / l(i, i);
    }
    std::vector<double> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
        x[ii] = s / l(ii, ii);
    }
    return x;
}

} // namespace ratekit::kernels
