#include "smap/oracle.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "smap/errors.hpp"

namespace smap::oracle {

Vector solve_linear_system(Matrix a, Vector b) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n) throw InvalidInput("elimination: dimension mismatch");

    double scale = 0.0;
    for (double v : a.entries()) scale = std::max(scale, std::abs(v));
    const double tol = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * scale;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
        }
        if (!(std::abs(a(pivot, col)) > tol)) {
            throw SingularSystem("elimination: rank deficient at column " + std::to_string(col));
        }
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a(col, c), a(pivot, c));
            std::swap(b[col], b[pivot]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double factor = a(r, col) / a(col, col);
            if (factor == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a(r, c) -= factor * a(col, c);
            b[r] -= factor * b[col];
        }
    }

    Vector x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a(i, c) * x[c];
        x[i] = s / a(i, i);
    }
    return x;
}

Vector solve_constrained(const ConstrainedLSProblem& p) {
    const std::size_t taps = p.x.rows();
    const std::size_t slots = p.x.cols();
    if (p.d.size() != slots || p.cv.size() != slots || p.w_prev.size() != taps) {
        throw InvalidInput("constrained problem: dimension mismatch");
    }
    if (slots > taps) throw SingularSystem("constrained problem: more constraints than taps");

    const std::size_t n = taps + slots;
    Matrix kkt(n, n);
    Vector rhs(n, 0.0);
    for (std::size_t i = 0; i < taps; ++i) {
        kkt(i, i) = 1.0;
        rhs[i] = p.w_prev[i];
        for (std::size_t j = 0; j < slots; ++j) {
            kkt(i, taps + j) = p.x(i, j);
            kkt(taps + j, i) = p.x(i, j);
        }
    }
    for (std::size_t j = 0; j < slots; ++j) rhs[taps + j] = p.d[j] - p.cv[j];

    Vector sol = solve_linear_system(std::move(kkt), std::move(rhs));
    sol.resize(taps);
    return sol;
}

}  // namespace smap::oracle
