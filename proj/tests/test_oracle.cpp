#include <doctest.h>

#include "smap/errors.hpp"
#include "smap/filters.hpp"
#include "smap/oracle.hpp"
#include "test_support.hpp"

using namespace smap;
using namespace smap::testing;

TEST_CASE("elimination solves a permuted system") {
    // needs a row swap at the first pivot
    const Matrix a = Matrix::from_rows({{0.0, 2.0, 1.0}, {1.0, 1.0, 0.0}, {3.0, 0.0, 1.0}});
    const Vector x = oracle::solve_linear_system(a, Vector{5.0, 3.0, 6.0});
    CHECK(x[0] == doctest::Approx(1.4));
    CHECK(x[1] == doctest::Approx(1.6));
    CHECK(x[2] == doctest::Approx(1.8));
    CHECK_THROWS_AS(oracle::solve_linear_system(Matrix::from_rows({{1.0, 2.0}, {2.0, 4.0}}),
                                                Vector{1.0, 2.0}),
                    SingularSystem);
}

TEST_CASE("already-satisfied constraint returns the previous coefficients") {
    auto rng = rng_for(61);
    const Matrix x = random_matrix(10, 3, rng);
    const Vector w_prev = random_vector(10, rng);
    const Vector d = random_vector(3, rng);
    Vector cv = d;
    const Vector y = naive_xtw(x, w_prev);
    for (std::size_t j = 0; j < 3; ++j) cv[j] -= y[j];
    const Vector w = oracle::solve_constrained({x, d, w_prev, cv});
    CHECK(max_abs_diff(w, w_prev) <= 1e-12);
}

TEST_CASE("L = 0 reference instance") {
    const Vector w = oracle::solve_constrained(
        {Matrix::from_rows({{1.0}, {0.0}}), Vector{1.0}, Vector{0.0, 0.0}, Vector{0.2236}});
    CHECK(w[0] == doctest::Approx(0.7764).epsilon(1e-12));
    CHECK(std::abs(w[1]) <= 1e-15);
}

TEST_CASE("random instances: feasibility, stationarity and agreement with the update") {
    auto rng = rng_for(62);
    for (int trial = 0; trial < 200; ++trial) {
        const Matrix x = random_matrix(10, 3, rng);
        const Vector w_prev = random_vector(10, rng);
        Vector d = naive_xtw(x, w_prev);
        d[0] += 1.0;  // |e0| = 1 > gamma_bar
        d[1] += random_vector(1, rng)[0];
        d[2] += random_vector(1, rng)[0];
        const Vector cv = uniform_vector(3, 0.2236, rng);
        const Vector w = oracle::solve_constrained({x, d, w_prev, cv});

        const Vector fitted = naive_xtw(x, w);
        for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(fitted[j] - (d[j] - cv[j])) <= 1e-9);

        // w - w_prev lies in range(X): its component orthogonal to the columns vanishes
        Vector step(10);
        for (std::size_t i = 0; i < 10; ++i) step[i] = w[i] - w_prev[i];
        const Vector coeffs = oracle::solve_linear_system(naive_gram(x), naive_xtw(x, step));
        const Vector proj = multiply(x, coeffs);
        CHECK(max_abs_diff(step, proj) <= 1e-8);

        const auto up = smap_update(FilterState{w_prev}, DataWindow::from(x, d), cv, 0.2236, 0.0);
        CHECK(max_abs_diff(up.state.w, w) <= 1e-8);
    }
}

TEST_CASE("rank-deficient regressors are reported") {
    auto rng = rng_for(63);
    Matrix x = random_matrix(10, 3, rng);
    x.set_column(2, x.column(0));
    CHECK_THROWS_AS(
        oracle::solve_constrained({x, Vector{1.0, 2.0, 3.0}, Vector(10, 0.0), Vector(3, 0.0)}),
        SingularSystem);
    CHECK_THROWS_AS(oracle::solve_constrained({random_matrix(2, 3, rng), Vector(3, 0.0),
                                               Vector(2, 0.0), Vector(3, 0.0)}),
                    SingularSystem);
}
