#include "smap/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "smap/errors.hpp"

namespace smap {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows * cols) {
        throw InvalidInput("matrix: " + std::to_string(data_.size()) + " entries for a " +
                           std::to_string(rows) + "x" + std::to_string(cols) + " shape");
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    std::vector<double> data;
    data.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c) throw InvalidInput("matrix: ragged rows");
        data.insert(data.end(), row.begin(), row.end());
    }
    return Matrix(r, c, std::move(data));
}

Vector Matrix::column(std::size_t c) const {
    Vector out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
}

void Matrix::set_column(std::size_t c, std::span<const double> values) {
    if (c >= cols_ || values.size() != rows_) throw InvalidInput("matrix: bad column assignment");
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = values[r];
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw InvalidInput("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double squared_norm(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return s;
}

double max_abs(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

bool all_finite(std::span<const double> a) {
    return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

Vector multiply(const Matrix& m, std::span<const double> v) {
    if (v.size() != m.cols()) throw InvalidInput("multiply: dimension mismatch");
    Vector out(m.rows(), 0.0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < m.cols(); ++c) s += m(r, c) * v[c];
        out[r] = s;
    }
    return out;
}

Vector multiply_transposed(const Matrix& m, std::span<const double> v) {
    if (v.size() != m.rows()) throw InvalidInput("multiply_transposed: dimension mismatch");
    Vector out(m.cols(), 0.0);
    for (std::size_t c = 0; c < m.cols(); ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < m.rows(); ++r) s += m(r, c) * v[r];
        out[c] = s;
    }
    return out;
}

Matrix gram(const Matrix& x) {
    if (x.cols() == 0) throw InvalidInput("gram: matrix has no columns");
    const std::size_t n = x.cols();
    Matrix g(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < x.rows(); ++r) s += x(r, i) * x(r, j);
            g(i, j) = s;
            g(j, i) = s;
        }
    }
    return g;
}

SpdFactor::SpdFactor(const Matrix& g, double delta) : n_(g.rows()), lower_(n_ * n_, 0.0) {
    if (g.rows() != g.cols()) throw InvalidInput("solve_spd: matrix is not square");
    if (!(delta >= 0.0)) throw InvalidInput("solve_spd: regularization must be non-negative");
    for (std::size_t j = 0; j < n_; ++j) {
        double diag = g(j, j) + delta;
        for (std::size_t k = 0; k < j; ++k) diag -= lower_[j * n_ + k] * lower_[j * n_ + k];
        if (!(diag > 0.0) || !std::isfinite(diag)) {
            throw SingularSystem("solve_spd: matrix is not positive definite (pivot " +
                                 std::to_string(j) + ")");
        }
        const double ljj = std::sqrt(diag);
        lower_[j * n_ + j] = ljj;
        for (std::size_t i = j + 1; i < n_; ++i) {
            double s = g(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= lower_[i * n_ + k] * lower_[j * n_ + k];
            lower_[i * n_ + j] = s / ljj;
        }
    }
}

Vector SpdFactor::solve(std::span<const double> b) const {
    if (b.size() != n_) throw InvalidInput("solve_spd: right-hand side length mismatch");
    Vector y(b.begin(), b.end());
    // L z = b
    for (std::size_t i = 0; i < n_; ++i) {
        double s = y[i];
        for (std::size_t k = 0; k < i; ++k) s -= lower_[i * n_ + k] * y[k];
        y[i] = s / lower_[i * n_ + i];
    }
    // L^T y = z
    for (std::size_t ii = n_; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t k = ii + 1; k < n_; ++k) s -= lower_[k * n_ + ii] * y[k];
        y[ii] = s / lower_[ii * n_ + ii];
    }
    return y;
}

double SpdFactor::quad_form(std::span<const double> u, std::span<const double> v) const {
    if (u.size() != n_) throw InvalidInput("quad_form: length mismatch");
    return dot(u, solve(v));
}

Vector solve_spd(const Matrix& g, std::span<const double> b, double delta) {
    return SpdFactor(g, delta).solve(b);
}

double quad_form(const Matrix& g, std::span<const double> u, std::span<const double> v,
                 double delta) {
    return SpdFactor(g, delta).quad_form(u, v);
}

}  // namespace smap
