#ifndef DOISMOL_SOLUTION_HPP
#define DOISMOL_SOLUTION_HPP

/**
 * @file solution.hpp
 * @brief Truncated eigenfunction-series densities, binding-time CDFs and
 *        closed-form mean binding times.
 *
 * Series are summed in ascending mode order and stop once two consecutive
 * terms fall below Truncation::term_tol. With a point source at r0 the
 * initial data inner product (g, eigenfunction_n) is eigenfunction_n(r0).
 */

#include "doismol/numerics.hpp"
#include "doismol/spectral.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace doismol {

struct Truncation {
    double term_tol = 1e-10;
    std::size_t max_modes = 5000;
};

/// Smallest supported evaluation time [s].
inline constexpr double kMinTime = 1e-8;
/// Below this time the series needs hundreds of modes; results are flagged.
inline constexpr double kSlowSeriesTime = 1e-5;

struct SolutionOptions {
    Truncation truncation;
    bool scale_4pi = true;  ///< divide densities by 4 pi (point source normalised on the sphere)
    double t_min = 1e-5;    ///< smallest time the mode budget must resolve
};

/**
 * @brief Partial sum of a truncated series.
 *
 * `truncated` is the warning raised when the mode list ran out before a term
 * dropped below the tolerance; `value` is then the partial sum and
 * `last_term` the magnitude of the final term included.
 */
struct SeriesValue {
    double value = 0.0;
    std::size_t terms = 0;
    bool truncated = false;
    double last_term = 0.0;
    bool slow_convergence = false;
};

/// Inner product (g, eigenfunction) for user supplied initial data.
using InnerProduct = std::function<double(const ModeSet&, const EigenMode&)>;

/// Number of modes needed so that exp(-D value t_min) kills the tail at term_tol.
std::size_t modes_needed(const Geometry& geom, double t_min, const Truncation& truncation);

class SpectralSolution {
public:
    /// Absorbing-sphere model with a point source at r0 in (r_b, R].
    static SpectralSolution smoluchowski(const Geometry& geom, double r0, SolutionOptions options = {});

    /// Reaction-potential model, lambda in s^-1, point source at r0 in (r_b, R].
    static SpectralSolution doi(const Geometry& geom, double lambda, double r0, SolutionOptions options = {});

    /// Either model with general initial data; `modes` must carry norm constants.
    static SpectralSolution with_initial_data(ModeSet modes, const InnerProduct& initial,
                                              SolutionOptions options = {});

    [[nodiscard]] SeriesValue density(double r, double t) const;

    /// Survival probability int density r^2 dr (times 4 pi when scaled).
    [[nodiscard]] SeriesValue survival(double t) const;

    /// P[T < t] = 1 - survival.
    [[nodiscard]] SeriesValue cdf(double t) const;

    /**
     * Per-mode spatial factors weight_n * eigenfunction_n(r), including the
     * 4 pi scaling. Lets grid evaluation reuse one radial profile across many
     * times.
     */
    [[nodiscard]] std::vector<double> profile(double r) const;

    /// Density at the radius `profile` was built for.
    [[nodiscard]] SeriesValue density_from_profile(std::span<const double> profile, double t) const;

    [[nodiscard]] const ModeSet& modes() const noexcept { return modes_; }
    [[nodiscard]] const Geometry& geometry() const noexcept { return modes_.geometry; }
    [[nodiscard]] Model model() const noexcept { return modes_.model; }
    [[nodiscard]] double lambda_hat() const noexcept { return modes_.lambda_hat; }
    [[nodiscard]] double r0() const noexcept { return r0_; }
    [[nodiscard]] const SolutionOptions& options() const noexcept { return options_; }

    /// b_n (g, psi_n) or a_n (g, phi_n).
    [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }
    /// int eigenfunction_n r^2 dr.
    [[nodiscard]] std::span<const double> moments() const noexcept { return moments_; }

private:
    SpectralSolution(ModeSet modes, double r0, SolutionOptions options);
    void fill_coefficients(const InnerProduct& initial);
    void check_time(double t) const;

    ModeSet modes_;
    double r0_ = 0.0;
    SolutionOptions options_;
    std::vector<double> weights_;
    std::vector<double> moments_;
    std::vector<double> decay_;  // D * value
};

SeriesValue density_smol(const SpectralSolution& sol, double r, double t);
SeriesValue density_doi(const SpectralSolution& sol, double r, double t);
SeriesValue cdf(const SpectralSolution& sol, double t);

// ----------------------------------------------------------------------------
// Mean binding times
// ----------------------------------------------------------------------------

/// Mean binding time of the Doi model from r0 in [0, R]; lambda in s^-1.
double mean_binding_doi(const Geometry& geom, double lambda, double r0);

/// Mean binding time of the Smoluchowski model from r0 in [r_b, R].
double mean_binding_smol(const Geometry& geom, double r0);

/// |<T_Doi> - <T_Smol>| for r0 > r_b from its own closed form (independent of r0).
double mean_diff(const Geometry& geom, double lambda, double r0);

/// |<T_Smol> - <T_Doi>| / <T_Smol>.
double rel_diff(const Geometry& geom, double lambda, double r0);

}  // namespace doismol

#endif  // DOISMOL_SOLUTION_HPP
