#ifndef DOISMOL_SPECTRAL_HPP
#define DOISMOL_SPECTRAL_HPP

/**
 * @file spectral.hpp
 * @brief Radial eigenproblems for the absorbing-sphere (Smoluchowski) and
 *        reaction-potential (Doi) models in a ball with a reflecting wall.
 *
 * Lengths are in micrometres and eigenvalues in inverse square micrometres.
 * The eigenproblems depend on the reaction rate only through
 * lambda_hat = lambda / D, so one mode set serves every diffusivity; time
 * decay is exp(-D * value * t).
 *
 * Outer eigenfunctions share the form
 *   H(z, r) = (1/r) [ sin(sqrt(z)(R - r)) / (R sqrt(z)) - cos(sqrt(z)(R - r)) ].
 */

#include "doismol/numerics.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace doismol {

/// Evaluation at (or numerically on top of) a pole of f or A.
class PoleError : public NumericsError {
public:
    using NumericsError::NumericsError;
};

struct Geometry {
    double r_b = 1e-3;  ///< reaction radius [um]
    double R = 1.0;     ///< domain radius [um]
    double D = 10.0;    ///< diffusivity [um^2/s]

    /// Throws DomainError unless 0 < r_b < R and D > 0.
    void validate() const;

    [[nodiscard]] double gap() const noexcept { return R - r_b; }
    [[nodiscard]] double kappa() const noexcept { return 1.0 - r_b / R; }
};

enum class Model { Smoluchowski, Doi };

std::string to_string(Model m);

struct EigenMode {
    std::size_t n = 0;        ///< 1-based index
    double value = 0.0;       ///< alpha_n or mu_n [um^-2]
    double norm_const = 0.0;  ///< a_n or b_n; 0 until mode_norms runs
};

struct ModeSet {
    Geometry geometry;
    Model model = Model::Smoluchowski;
    double lambda_hat = 0.0;  ///< lambda / D; unused for Smoluchowski
    std::vector<EigenMode> modes;
    bool partial = false;     ///< fewer modes than requested were found

    [[nodiscard]] std::size_t count() const noexcept { return modes.size(); }
    [[nodiscard]] std::vector<double> values() const;
};

/// Requested Doi modes could not all be located below the scan ceiling.
class ExhaustionError : public NumericsError {
public:
    ExhaustionError(const std::string& what, ModeSet partial_result)
        : NumericsError(what), partial_(std::move(partial_result)) {}
    [[nodiscard]] const ModeSet& partial() const noexcept { return partial_; }

private:
    ModeSet partial_;
};

// ----------------------------------------------------------------------------
// Characteristic functions
// ----------------------------------------------------------------------------

/// f(mu) = (R sqrt(mu) - tan(sqrt(mu)(R - r_b))) / (R mu tan(sqrt(mu)(R - r_b)) + sqrt(mu)).
double f_smol(const Geometry& geom, double mu);

/// A(mu, lambda_hat): tanh branch below lambda_hat, tan branch above, r_b at the seam.
double reaction_kernel_A(const Geometry& geom, double mu, double lambda_hat);

/**
 * Pole-free numerator of f as a function of k = sqrt(mu):
 * N(k) = R cos(kc) - c sin(kc)/(kc), c = R - r_b.  N(0) = r_b and the
 * Smoluchowski eigenvalues are exactly its positive zeros.
 */
double smol_numerator(const Geometry& geom, double k) noexcept;

/// Denominator partner of smol_numerator: Dn(k) = R k sin(kc) + cos(kc), zeros at the poles beta_n.
double smol_denominator(const Geometry& geom, double k) noexcept;

/**
 * Continuous root function for the Doi eigenvalues, no poles for any mu >= 0:
 *   N - A Dn                                           (mu <= lambda_hat)
 *   cos(q r_b) N - (sin(q r_b)/q) Dn,  q = sqrt(mu - lambda_hat)   (mu > lambda_hat)
 */
double doi_matching(const Geometry& geom, double mu, double lambda_hat);

/// First `count` poles beta_n of f, ascending.
std::vector<double> smol_poles(const Geometry& geom, std::size_t count);

/// First `count` eigenvalues of the radial Neumann Laplacian on the full ball (lambda = 0).
std::vector<double> neumann_ball_eigenvalues(double R, std::size_t count);

// ----------------------------------------------------------------------------
// Eigenvalue solvers
// ----------------------------------------------------------------------------

inline constexpr double kRootRelTol = 1e-14;

/// First `count` Smoluchowski eigenvalues alpha_n with normalization constants filled.
ModeSet smol_eigenvalues(const Geometry& geom, std::size_t count);

/**
 * First `count` Doi eigenvalues mu_n(lambda_hat) with normalization constants.
 *
 * Modes at or below lambda_hat come from the interlacing brackets
 * (beta_{n-1}, alpha_n); modes above it from a sign-change scan of
 * doi_matching in sqrt(mu), checked against gamma_n <= mu_n <= alpha_n.
 */
ModeSet doi_eigenvalues(const Geometry& geom, double lambda_hat, std::size_t count);

// ----------------------------------------------------------------------------
// Eigenfunctions and norms
// ----------------------------------------------------------------------------

/// Outer profile H(z, r) for r in (0, R].
double outer_profile(const Geometry& geom, double z, double r);

/// Smoluchowski eigenfunction; zero on [0, r_b).
double phi(const Geometry& geom, double alpha_n, double r);

/// Doi eigenfunction on [0, R]; r = 0 returns the regular limit.
double psi(const Geometry& geom, double lambda_hat, double mu_n, double r);

/// h(z) = int_{r_b}^R H(z, r)^2 r^2 dr in closed form.
double outer_norm_sq(const Geometry& geom, double z);

/// int_0^{r_b} psi_in^2 r^2 dr for the Doi mode mu_n.
double inner_norm_sq(const Geometry& geom, double lambda_hat, double mu_n);

/// int_{r_b}^R H(z, r) r^2 dr in closed form.
double outer_moment(const Geometry& geom, double z);

/// int_0^{r_b} psi_in r^2 dr for the Doi mode mu_n.
double inner_moment(const Geometry& geom, double lambda_hat, double mu_n);

/// int eigenfunction * r^2 dr over the model's domain ([r_b, R] or [0, R]).
double mode_moment(const ModeSet& set, const EigenMode& mode);

/// Fills norm_const: a_n = 1/h(alpha_n), b_n = 1/(||psi_in||^2 + h(mu_n)).
ModeSet mode_norms(const Geometry& geom, ModeSet modes);

/// Evaluates the eigenfunction belonging to `mode` at r.
double eigenfunction(const ModeSet& set, const EigenMode& mode, double r);

}  // namespace doismol

#endif  // DOISMOL_SPECTRAL_HPP
