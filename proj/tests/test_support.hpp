#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "smap/numerics.hpp"

// Test-only generators and naive reference computations. Nothing here calls
// into the code paths it is used to check.
namespace smap::testing {

inline std::mt19937_64 rng_for(std::uint64_t seed) { return std::mt19937_64(seed); }

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = normal(rng);
    return m;
}

inline Vector random_vector(std::size_t n, std::mt19937_64& rng, double sd = 1.0) {
    std::normal_distribution<double> normal(0.0, sd);
    Vector v(n);
    for (double& x : v) x = normal(rng);
    return v;
}

inline Vector uniform_vector(std::size_t n, double bound, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-bound, bound);
    Vector v(n);
    for (double& x : v) x = u(rng);
    return v;
}

/// Triple-loop X^T X.
inline Matrix naive_gram(const Matrix& x) {
    Matrix g(x.cols(), x.cols());
    for (std::size_t i = 0; i < x.cols(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < x.rows(); ++r) s += x(r, i) * x(r, j);
            g(i, j) = s;
        }
    return g;
}

/// Random SPD matrix B^T B + n I.
inline Matrix random_spd(std::size_t n, std::mt19937_64& rng) {
    Matrix g = naive_gram(random_matrix(n + 2, n, rng));
    for (std::size_t i = 0; i < n; ++i) g(i, i) += 0.5;
    return g;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// Row-by-row inner products, one per column: x_j^T w.
inline Vector naive_xtw(const Matrix& x, std::span<const double> w) {
    Vector out(x.cols());
    for (std::size_t j = 0; j < x.cols(); ++j) {
        double s = 0.0;
        for (std::size_t r = 0; r < x.rows(); ++r) s += x(r, j) * w[r];
        out[j] = s;
    }
    return out;
}

}  // namespace smap::testing
