#ifndef DOISMOL_MC_HPP
#define DOISMOL_MC_HPP

/**
 * @file mc.hpp
 * @brief Brownian-dynamics estimator of binding times in the reflecting ball.
 *
 * Euler-Maruyama in Cartesian coordinates, x <- x + sqrt(2 D dt) xi, with
 * radial mirroring at R. Smoluchowski paths bind as soon as |x| <= r_b;
 * Doi paths bind with probability 1 - exp(-lambda dt) after each step that
 * ends inside r_b. Each path draws from its own generator seeded from
 * (seed, path index), so results do not depend on thread count.
 *
 * Away from the reaction sphere, runs of m steps are merged into one Gaussian
 * move of variance m * 2 D dt. m is chosen so that the walk cannot reach r_b
 * during the run except with negligible probability. At the reflecting wall a
 * mirrored merged step has the law of m mirrored substeps up to the wall
 * curvature, so the merged step is also capped at 0.05 R.
 */

#include "doismol/spectral.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace doismol {

class ConfigError : public NumericsError {
public:
    using NumericsError::NumericsError;
};

struct McConfig {
    double dt = 5e-7;           ///< time step [s]
    std::size_t n_paths = 10000;
    std::uint64_t seed = 1;
    double t_max = 5.0;         ///< censoring time [s]
    Model model = Model::Smoluchowski;
    double lambda = 0.0;        ///< Doi reaction rate [s^-1]
    unsigned threads = 1;       ///< worker threads; 0 picks hardware concurrency
    bool merge_steps = true;    ///< merge far-field steps (see file comment)

    /// Throws ConfigError when sqrt(2 D dt) > r_b / 10 or other fields are invalid.
    void validate(const Geometry& geom) const;
};

struct BindingEvent {
    double time = 0.0;  ///< binding time, or t_max when censored
    bool bound = false;
};

struct BindingSample {
    std::vector<BindingEvent> events;  ///< in path order
    std::vector<double> sorted_bound;  ///< ascending binding times
    std::size_t n_paths = 0;
    std::size_t n_bound = 0;
    double mean_restricted = 0.0;   ///< mean of min(T, t_max)
    double ci95_halfwidth = 0.0;    ///< 1.96 * standard error of that mean
    double censored_fraction = 0.0; ///< paths still unbound at t_max
    double t_max = 0.0;
    double dt = 0.0;
    std::uint64_t seed = 0;
    Model model = Model::Smoluchowski;
    double lambda = 0.0;
};

/// Observer for test instrumentation: (time, radius) after every accepted move.
using PathObserver = std::function<void(double, double)>;

/// Seed of the generator for one path; a pure function of (seed, path).
std::uint64_t path_seed(std::uint64_t seed, std::uint64_t path) noexcept;

/// One path from radius r0; returns its binding event.
BindingEvent simulate_path(const Geometry& geom, double r0, const McConfig& cfg, std::uint64_t path,
                           const PathObserver& observer = {});

BindingSample simulate(const Geometry& geom, double r0, const McConfig& cfg);

/// Fraction of all paths bound at or before t.
double ecdf_at(const BindingSample& sample, double t);

/// Binomial standard error of an ECDF value p over n paths.
double ecdf_standard_error(double p, std::size_t n) noexcept;

}  // namespace doismol

#endif  // DOISMOL_MC_HPP
