#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace smap {

using Vector = std::vector<double>;

/// Dense row-major matrix. Sized for the handful of rows and columns an
/// affine-projection window needs; no expression templates, no views.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

    static Matrix identity(std::size_t n);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<const double> entries() const noexcept { return data_; }

    /// Copy of column c.
    Vector column(std::size_t c) const;
    void set_column(std::size_t c, std::span<const double> values);

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> a);
double max_abs(std::span<const double> a);
bool all_finite(std::span<const double> a);

/// y = M v
Vector multiply(const Matrix& m, std::span<const double> v);
/// y = M^T v
Vector multiply_transposed(const Matrix& m, std::span<const double> v);

/// X^T X. The upper triangle is computed and mirrored, so the result is
/// symmetric bit for bit.
Matrix gram(const Matrix& x);

/// Solves (G + delta I) y = b through a Cholesky factorization.
/// Throws SingularSystem when G + delta I is not positive definite.
Vector solve_spd(const Matrix& g, std::span<const double> b, double delta);

/// u^T (G + delta I)^{-1} v.
double quad_form(const Matrix& g, std::span<const double> u, std::span<const double> v,
                 double delta);

/// Cholesky factor of G + delta I, reusable across several right-hand sides.
/// The robustness checker evaluates four quadratic forms per iteration against
/// the same operator; factoring once keeps them consistent with each other.
class SpdFactor {
public:
    SpdFactor(const Matrix& g, double delta);

    std::size_t size() const noexcept { return n_; }
    Vector solve(std::span<const double> b) const;
    double quad_form(std::span<const double> u, std::span<const double> v) const;

private:
    std::size_t n_;
    std::vector<double> lower_;  // row-major, lower triangle used
};

}  // namespace smap
