#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace warpedheat {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside an operation's domain (bad nu, b <= 0, grid too small, ...).
struct InvalidParameter : Error {
    using Error::Error;
};

// Evaluation requested at (or within tolerance of) a pole.
struct PoleError : Error {
    std::complex<double> location;
    PoleError(const std::string& what, std::complex<double> loc)
        : Error(what), location(loc) {}
};

// A series or iteration hit its budget without meeting tolerance.
struct NoConvergence : Error {
    using Error::Error;
};

// Warp does not decay fast enough for a finite volume.
struct DivergentVolume : Error {
    using Error::Error;
};

// Geodesic reached a radial turning point before the requested arc length.
struct TurningPoint : Error {
    double turning_y;
    double arc_to_turning;
    TurningPoint(const std::string& what, double yt, double smax)
        : Error(what), turning_y(yt), arc_to_turning(smax) {}
};

// Lattice enumeration budget exceeded for the requested cutoff.
struct CutoffTooLarge : Error {
    using Error::Error;
};

// Discrete index outside the valid range (eigenfunction label, mode number).
struct IndexOutOfRange : Error {
    using Error::Error;
};

// A certified truncation bound cannot be met with the data at hand.
// `required` suggests the cutoff / mode count that would be needed.
struct TruncationInsufficient : Error {
    double required;
    TruncationInsufficient(const std::string& what, double req)
        : Error(what), required(req) {}
};

// antiderivative() asked for a polynomial that is not an exact derivative.
struct NotExactDerivative : Error {
    using Error::Error;
};

// evaluate() was handed fewer derivative values than the polynomial needs.
struct InsufficientDerivatives : Error {
    using Error::Error;
};

// Resolvent evaluated on the spectrum (cut or discrete eigenvalue).
struct OnSpectrum : Error {
    using Error::Error;
};

// The analytic tail bound of a momentum integral exceeds its budget.
struct TailBoundViolated : Error {
    using Error::Error;
};

// Root finding / eigen iteration failed to locate its target.
struct ConvergenceFailure : Error {
    using Error::Error;
};

// Time-stepper step count violates the stability/accuracy budget.
struct StepBudget : Error {
    using Error::Error;
};

// Evaluation outside the convergence region of a representation.
struct OutsideConvergence : Error {
    using Error::Error;
};

// Operation not available for this cross-section type.
struct UnsupportedCrossSection : Error {
    using Error::Error;
};

// Closed-form coefficient integral diverges for these parameters.
struct DivergentCoefficient : Error {
    using Error::Error;
};

}  // namespace warpedheat
