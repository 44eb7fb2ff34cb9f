#pragma once

// Error taxonomy for the todakit library.  Every failure mode that callers
// are expected to handle gets its own type so that tests and the CLI can
// distinguish "bad input" from "numerical breakdown" without string matching.

#include <stdexcept>
#include <string>

namespace todakit {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// --- input / geometry ------------------------------------------------------

// Branch points violate 0 < 1 < x_1 < u_1 < ... < x_g < u_g (or two of them
// collide within the degeneracy floor).
struct OrderingViolation : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

// Evaluation requested at (or numerically on top of) a branch point.
struct BranchPointHit : Error {
    using Error::Error;
};

struct CoincidentPoints : Error {
    using Error::Error;
};

struct InputParseError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

// --- numerics --------------------------------------------------------------

struct QuadratureNotConverged : Error {
    using Error::Error;
};

// Period matrix (or another structural linear system) is numerically singular.
struct SingularPeriodMatrix : Error {
    using Error::Error;
};

struct SingularJacobian : Error {
    using Error::Error;
};

struct NewtonDiverged : Error {
    using Error::Error;
};

// A denominator that the deformation formulas divide by fell below the
// safe floor (e.g. the differential vanishes at a ramification point).
struct DenominatorVanishes : Error {
    using Error::Error;
};

struct PoleHit : Error {
    using Error::Error;
};

// A flow that must preserve real ordered branch points produced a complex
// or disordered configuration.
struct RealityLost : Error {
    using Error::Error;
};

// --- polynomial / lattice certificates --------------------------------------

struct NotRational : Error {
    using Error::Error;
};

struct NotPerfectSquare : Error {
    using Error::Error;
};

struct ParityViolation : Error {
    using Error::Error;
};

struct NegativeEndpoint : Error {
    using Error::Error;
};

// Theta-function argument landed on (or too close to) the theta divisor,
// so a quotient of theta values is meaningless.
struct ThetaDivisorHit : Error {
    using Error::Error;
};

} // namespace todakit
