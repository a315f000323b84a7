#pragma once

#include <stdexcept>
#include <string>

namespace vortex {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Graph construction / validation failures (bad weight, self loop, disconnected, ...).
class GraphError : public Error {
public:
    using Error::Error;
};

/// A field was paired with a graph it was not built on.
class FieldMismatchError : public Error {
public:
    using Error::Error;
};

class UnknownVertexError : public Error {
public:
    using Error::Error;
};

/// Right-hand side of a zero-mean Poisson solve has nonzero mean.
class NonzeroMeanError : public Error {
public:
    using Error::Error;
};

/// Exponent outside the representable range (|u| > 700 before exponentiation).
class NumericRangeError : public Error {
public:
    using Error::Error;
};

/// Structure-condition violations of the coupling matrix decomposition K^T = P S.
class CartanError : public Error {
public:
    enum class Kind {
        NotSymmetric,       // S = P^{-1} K^T is not symmetric
        BadSignPattern,     // diagonal of S not positive, or an off-diagonal entry positive
        NotPositiveDefinite,
        InverseNotPositive, // an entry of S^{-1} (or Q^{-1}) is not strictly positive
        NonpositiveR,       // a row sum of (K^T)^{-1} is not positive
        PatternInconsistent, // no positive diagonal P symmetrizes K^T
        ReduciblePattern,    // off-diagonal pattern disconnected: P not determined up to one scale
        InconsistentInput,   // vortex counts / vertices do not match
    };

    CartanError(Kind k, const std::string& msg) : Error(msg), kind_(k) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

const char* to_string(CartanError::Kind k);

/// The moment state violates the discriminant condition; the constant shift is unsolvable.
class NotAdmissibleError : public Error {
public:
    using Error::Error;
};

/// An iterative solver left its a-priori bounds or hit its iteration cap.
class SolverError : public Error {
public:
    using Error::Error;
};

/// lambda is at or below the necessary existence threshold lambda0.
class LambdaBelowThresholdError : public Error {
public:
    LambdaBelowThresholdError(double lambda, double lambda0, const std::string& msg)
        : Error(msg), lambda_(lambda), lambda0_(lambda0) {}
    double lambda() const { return lambda_; }
    double lambda0() const { return lambda0_; }

private:
    double lambda_;
    double lambda0_;
};

/// No admissible starting point was found; carries the coupling that would make the seed admissible.
class SeedNotAdmissibleError : public Error {
public:
    SeedNotAdmissibleError(double required_lambda, const std::string& msg)
        : Error(msg), required_lambda_(required_lambda) {}
    double required_lambda() const { return required_lambda_; }

private:
    double required_lambda_;
};

} // namespace vortex
