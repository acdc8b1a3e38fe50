#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "tricept/errors.hpp"

namespace tricept {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles. Small sizes only; everything here is
// naive loops on purpose so it can be audited line by line.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    Vector& data() { return data_; }
    const Vector& data() const { return data_; }

    Matrix transposed() const;
    Vector row(std::size_t i) const;
    void set_row(std::size_t i, const Vector& v);

    // Entry-wise finiteness check; throws InvalidArgumentError when violated.
    void require_finite(const char* what) const;

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Vector data_;
};

// Standard product; throws ShapeError on inner-dimension mismatch.
Matrix matmul(const Matrix& a, const Matrix& b);

// Matrix * vector convenience built on the same loop.
Vector matvec(const Matrix& a, const Vector& x);

// Solves (A + jitter*I) x = b for symmetric positive definite A by Cholesky.
// If the factorization hits a non-positive pivot the jitter is escalated
// tenfold (starting from 1e-12 * trace(A)/n when the given jitter is zero)
// up to 1e-3 * trace(A)/n; past that a NumericalError is thrown.
Vector solve_spd(const Matrix& a, const Vector& b, double jitter = 0.0);

// Minimizes ||A X - B||_F column by column. Householder QR is the primary
// route; on numerical rank deficiency it falls back to normal equations
// solved through solve_spd's jitter escalation. Requires A.rows >= A.cols.
Matrix least_squares(const Matrix& a, const Matrix& b);

// Central finite differences: entry (i, j) = (f_i(x + h e_j) - f_i(x - h e_j)) / (2h).
Matrix finite_difference_jacobian(const std::function<Vector(const Vector&)>& f,
                                  const Vector& x, double h);

} // namespace tricept
