#pragma once

#include <cstddef>
#include <vector>

#include "ratekit/common.hpp"

namespace ratekit {

// Dense row-major matrix of doubles. Deliberately minimal: storage plus
// indexed access; all math lives in the kernels below.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* row(std::size_t r) { return data_.data() + r * cols_; }
    const double* row(std::size_t r) const { return data_.data() + r * cols_; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

namespace kernels {

// Execution policy. Auto picks the OpenMP path for large-enough work when
// not already inside a parallel region; Serial is the reference
// implementation kept for testing and for nested calls.
//
// Every parallel kernel distributes *independent output elements* across
// threads and keeps each element's accumulation order identical to the
// serial path, so Serial and Parallel results are bit-identical and results
// do not depend on the thread count.
enum class Exec { Auto, Serial, Parallel };

void set_parallel_enabled(bool enabled);
bool parallel_enabled();

// C = A * B          (A: m x k, B: k x n, C: m x n)
void matmul_nn(const Matrix& a, const Matrix& b, Matrix& c, Exec exec = Exec::Auto);
// C = A * B^T        (A: m x k, B: n x k, C: m x n)
void matmul_nt(const Matrix& a, const Matrix& b, Matrix& c, Exec exec = Exec::Auto);
// C = A^T * B        (A: k x m, B: k x n, C: m x n)
void matmul_tn(const Matrix& a, const Matrix& b, Matrix& c, Exec exec = Exec::Auto);

// Y = X * W^T + b    (X: n x in, W: out x in, b: out)
void dense_forward(const Matrix& x, const Matrix& w, const std::vector<double>& b, Matrix& y,
                   Exec exec = Exec::Auto);
// dX = dY * W
void dense_backward_input(const Matrix& dy, const Matrix& w, Matrix& dx, Exec exec = Exec::Auto);
// dW = dY^T * X, db = column sums of dY
void dense_backward_params(const Matrix& x, const Matrix& dy, Matrix& dw, std::vector<double>& db,
                           Exec exec = Exec::Auto);

// Solve the symmetric positive-definite system A x = rhs by Cholesky.
// Throws NumericError when A is not positive definite.
std::vector<double> solve_spd(const Matrix& a, const std::vector<double>& rhs);

} // namespace kernels
} // namespace ratekit
