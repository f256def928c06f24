#pragma once

#include <stdexcept>
#include <string>

namespace vandermonde {

// Bad caller input: out-of-range parameters, malformed configs, p above cap.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A computation that ran but produced something it cannot vouch for.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Lattice counts that do not follow an exact polynomial in (2M+1).
class DegeneracyError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Complex integral estimate whose imaginary part is not negligible.
class RealnessViolation : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Enumeration or memory budget exceeded.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace vandermonde
