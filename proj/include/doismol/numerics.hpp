#ifndef DOISMOL_NUMERICS_HPP
#define DOISMOL_NUMERICS_HPP

/**
 * @file numerics.hpp
 * @brief Scalar kernels shared by the spectral, solution and harness layers.
 *
 * Bracketed root finding, adaptive quadrature, overflow-safe hyperbolic
 * ratios, cancellation-free trigonometric auxiliaries and log-log slope
 * fitting. Everything here is pure and reentrant.
 */

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

namespace doismol {

// ============================================================================
// Errors
// ============================================================================

class NumericsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bracket endpoints do not enclose a sign change.
class BracketError : public NumericsError {
public:
    using NumericsError::NumericsError;
};

/// The function under evaluation produced a NaN.
class EvaluationError : public NumericsError {
public:
    using NumericsError::NumericsError;
};

/// Adaptive refinement hit its depth limit before meeting the tolerance.
class AccuracyError : public NumericsError {
public:
    using NumericsError::NumericsError;
};

/// Argument outside the mathematical domain of the operation.
class DomainError : public NumericsError {
public:
    using NumericsError::NumericsError;
};

using ScalarFunction = std::function<double(double)>;

// ============================================================================
// Root finding
// ============================================================================

/**
 * @brief Interval [lo, hi] with function values whose product is <= 0.
 */
struct Bracket {
    double lo = 0.0;
    double hi = 0.0;
    double f_lo = 0.0;
    double f_hi = 0.0;

    /// Evaluates f at both ends and validates the sign change.
    static Bracket make(const ScalarFunction& f, double lo, double hi);

    [[nodiscard]] bool valid() const noexcept;
};

/**
 * @brief Finds a zero of f inside the bracket.
 *
 * Illinois false-position steps alternate with forced bisection, so the
 * bracket at least halves every two iterations and never widens. Stops once
 * hi - lo <= rel_tol * max(1, |x|). The returned point always lies in the
 * original bracket.
 */
double find_root(const ScalarFunction& f, const Bracket& bracket, double rel_tol = 1e-14);

// ============================================================================
// Quadrature
// ============================================================================

/**
 * @brief Adaptive Gauss-Kronrod estimate of the integral of f over [a, b].
 *
 * Throws AccuracyError when the error estimate is still above abs_tol at the
 * maximum refinement depth.
 */
double integrate(const ScalarFunction& f, double a, double b, double abs_tol);

// ============================================================================
// Stable elementary auxiliaries
// ============================================================================

/// sinh(a)/sinh(b) for 0 <= a <= b without overflow.
double sinh_ratio(double a, double b);

/// sin(y)/y, equal to 1 at y = 0.
double sinc(double y) noexcept;

/// 1 - sin(y)/y without cancellation near y = 0.
double one_minus_sinc(double y) noexcept;

/// (sin(y) - y cos(y)) / y^3, tending to 1/3 at y = 0.
double sin_minus_ycos_over_cube(double y) noexcept;

/// tanh(x)/x, equal to 1 at x = 0.
double tanhc(double x) noexcept;

/// tan(x)/x, equal to 1 at x = 0. Caller guards the poles.
double tanc(double x) noexcept;

/// (x coth(x) - 1)/x^2, tending to 1/3 at x = 0.
double xcoth_minus_one_over_square(double x) noexcept;

/// (sinh(2x) - 2x) / (4 x sinh(x)^2), tending to 1/3 at x = 0, ~1/(2x) for large x.
double sinh_square_moment(double x) noexcept;

// ============================================================================
// Summation
// ============================================================================

/// Neumaier compensated accumulator.
class CompensatedSum {
public:
    void add(double v) noexcept;
    [[nodiscard]] double value() const noexcept { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

// ============================================================================
// Convergence-rate fitting
// ============================================================================

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;
    std::size_t n_points = 0;
};

/// Least-squares line through (ln x, ln y). Requires >= 2 points, all positive.
SlopeFit loglog_slope(std::span<const std::pair<double, double>> points);

}  // namespace doismol

#endif  // DOISMOL_NUMERICS_HPP
