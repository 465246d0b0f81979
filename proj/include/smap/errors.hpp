#pragma once

#include <stdexcept>
#include <string>

namespace smap {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dimension mismatch or an argument outside its documented domain.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A factorization or elimination met a (numerically) singular system.
class SingularSystem : public Error {
public:
    using Error::Error;
};

/// A constraint vector handed to the update has a component above the threshold.
class InvalidConstraint : public Error {
public:
    using Error::Error;
};

/// A strategy could not produce a constraint vector inside the threshold.
class ConstraintInfeasible : public Error {
public:
    using Error::Error;
};

/// A robustness ratio would divide by zero.
class DegenerateDenominator : public Error {
public:
    using Error::Error;
};

}  // namespace smap
