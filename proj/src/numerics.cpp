#include "tricept/numerics.hpp"

#include <cmath>
#include <string>

namespace tricept {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            t(j, i) = (*this)(i, j);
    return t;
}

Vector Matrix::row(std::size_t i) const {
    return Vector(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                  data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
}

void Matrix::set_row(std::size_t i, const Vector& v) {
    if (v.size() != cols_) throw ShapeError("set_row: length mismatch");
    for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) = v[j];
}

void Matrix::require_finite(const char* what) const {
    for (double v : data_)
        if (!std::isfinite(v))
            throw InvalidArgumentError(std::string(what) + ": non-finite entry");
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw ShapeError("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         " * " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j)
                c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

Vector matvec(const Matrix& a, const Vector& x) {
    if (a.cols() != x.size()) throw ShapeError("matvec: dimension mismatch");
    Vector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

namespace {

// In-place lower Cholesky of (A + jitter I); returns false on a
// non-positive or non-finite pivot.
bool cholesky(Matrix& m, double jitter) {
    const std::size_t n = m.rows();
    for (std::size_t i = 0; i < n; ++i) m(i, i) += jitter;
    for (std::size_t j = 0; j < n; ++j) {
        double d = m(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= m(j, k) * m(j, k);
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        const double l = std::sqrt(d);
        m(j, j) = l;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = m(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= m(i, k) * m(j, k);
            m(i, j) = s / l;
        }
    }
    return true;
}

Vector cholesky_solve(const Matrix& l, const Vector& b) {
    const std::size_t n = l.rows();
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
        y[i] = s / l(i, i);
    }
    Vector x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
        x[ii] = s / l(ii, ii);
    }
    return x;
}

double trace_over_n(const Matrix& a) {
    double t = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
    return t / static_cast<double>(a.rows());
}

} // namespace

Vector solve_spd(const Matrix& a, const Vector& b, double jitter) {
    if (a.rows() != a.cols()) throw ShapeError("solve_spd: matrix not square");
    if (a.rows() != b.size()) throw ShapeError("solve_spd: rhs length mismatch");
    if (jitter < 0.0) throw InvalidArgumentError("solve_spd: negative jitter");

    const double base = std::abs(trace_over_n(a));
    const double cap = 1e-3 * base;
    double j = jitter;
    for (;;) {
        Matrix l = a;
        if (cholesky(l, j)) return cholesky_solve(l, b);
        const double next = (j == 0.0) ? 1e-12 * base : 10.0 * j;
        if (next > cap || next == j)
            throw NumericalError("solve_spd: matrix not positive definite after jitter escalation");
        j = next;
    }
}

namespace {

// Householder QR, factors stored in place. Returns the diagonal of R.
// Vectors are kept below the diagonal with the usual implicit leading 1.
Vector householder_qr(Matrix& a) {
    const std::size_t m = a.rows(), n = a.cols();
    Vector rdiag(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double nrm = 0.0;
        for (std::size_t i = k; i < m; ++i) nrm = std::hypot(nrm, a(i, k));
        if (nrm != 0.0) {
            if (a(k, k) < 0.0) nrm = -nrm;
            for (std::size_t i = k; i < m; ++i) a(i, k) /= nrm;
            a(k, k) += 1.0;
            for (std::size_t j = k + 1; j < n; ++j) {
                double s = 0.0;
                for (std::size_t i = k; i < m; ++i) s += a(i, k) * a(i, j);
                s = -s / a(k, k);
                for (std::size_t i = k; i < m; ++i) a(i, j) += s * a(i, k);
            }
        }
        rdiag[k] = -nrm;
    }
    return rdiag;
}

} // namespace

Matrix least_squares(const Matrix& a, const Matrix& b) {
    const std::size_t m = a.rows(), n = a.cols(), p = b.cols();
    if (m < n) throw ShapeError("least_squares: system is underdetermined");
    if (b.rows() != m) throw ShapeError("least_squares: rhs row count mismatch");

    Matrix qr = a;
    Vector rdiag = householder_qr(qr);

    double rmax = 0.0;
    for (double d : rdiag) rmax = std::max(rmax, std::abs(d));
    const double rank_tol = static_cast<double>(m) * 2.220446049250313e-16 * rmax;
    bool deficient = (rmax == 0.0);
    for (double d : rdiag)
        if (std::abs(d) < rank_tol) deficient = true;

    if (!deficient) {
        Matrix y = b;
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t j = 0; j < p; ++j) {
                double s = 0.0;
                for (std::size_t i = k; i < m; ++i) s += qr(i, k) * y(i, j);
                s = -s / qr(k, k);
                for (std::size_t i = k; i < m; ++i) y(i, j) += s * qr(i, k);
            }
        }
        Matrix x(n, p);
        for (std::size_t j = 0; j < p; ++j) {
            for (std::size_t ii = n; ii-- > 0;) {
                double s = y(ii, j);
                for (std::size_t k = ii + 1; k < n; ++k) s -= qr(ii, k) * x(k, j);
                x(ii, j) = s / rdiag[ii];
            }
        }
        return x;
    }

    // Rank-deficient rescue: normal equations with escalating jitter.
    const Matrix at = a.transposed();
    const Matrix ata = matmul(at, a);
    const Matrix atb = matmul(at, b);
    const double start_jitter = 1e-10 * std::abs(trace_over_n(ata));
    Matrix x(n, p);
    for (std::size_t j = 0; j < p; ++j) {
        Vector col(m == 0 ? 0 : n);
        for (std::size_t i = 0; i < n; ++i) col[i] = atb(i, j);
        Vector xc = solve_spd(ata, col, start_jitter);
        for (std::size_t i = 0; i < n; ++i) x(i, j) = xc[i];
    }
    return x;
}

Matrix finite_difference_jacobian(const std::function<Vector(const Vector&)>& f,
                                  const Vector& x, double h) {
    if (!(h > 0.0)) throw InvalidArgumentError("finite_difference_jacobian: h must be positive");
    const std::size_t n = x.size();
    Matrix jac;
    for (std::size_t j = 0; j < n; ++j) {
        Vector xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        const Vector fp = f(xp), fm = f(xm);
        if (fp.size() != fm.size())
            throw ShapeError("finite_difference_jacobian: inconsistent output size");
        if (j == 0) jac = Matrix(fp.size(), n);
        for (std::size_t i = 0; i < fp.size(); ++i) {
            const double d = (fp[i] - fm[i]) / (2.0 * h);
            if (!std::isfinite(d))
                throw NumericalError("finite_difference_jacobian: non-finite difference");
            jac(i, j) = d;
        }
    }
    return jac;
}

} // namespace tricept
