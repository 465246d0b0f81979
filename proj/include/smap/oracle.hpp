#pragma once

#include "smap/numerics.hpp"

namespace smap::oracle {

/// minimize |w - w_prev|^2  subject to  X^T w = d - cv
struct ConstrainedLSProblem {
    Matrix x;
    Vector d;
    Vector w_prev;
    Vector cv;
};

/// Gaussian elimination with partial pivoting on a general square system.
/// Throws SingularSystem when a pivot falls below n * eps * max|a_ij|.
Vector solve_linear_system(Matrix a, Vector b);

/// Solves the KKT system
///
///   [ I    X ] [ w      ]   [ w_prev ]
///   [ X^T  0 ] [ lambda ] = [ d - cv ]
///
/// with solve_linear_system. Deliberately shares nothing with the
/// Cholesky path used by the filter update.
Vector solve_constrained(const ConstrainedLSProblem& problem);

}  // namespace smap::oracle
