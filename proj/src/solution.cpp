#include "doismol/solution.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <sstream>

namespace doismol {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;
// Generous bound on |weight * eigenfunction| used only for the mode budget.
constexpr double kTermBound = 1e6;

void require_source(const Geometry& geom, double r0) {
    if (!(r0 > geom.r_b && r0 <= geom.R)) {
        std::ostringstream msg;
        msg << "source radius r0 = " << r0 << " outside (r_b, R] = (" << geom.r_b << ", "
            << geom.R << "]";
        throw DomainError(msg.str());
    }
}

// sinh(s r) / (r sinh(s r_b)) for 0 <= r <= r_b.
double interior_sinh_profile(double s, double r, double r_b) {
    const double x = s * r_b;
    const double y = s * r;
    if (y < 1.0) {
        const double shc_y = y < 1e-4 ? 1.0 + y * y / 6.0 : std::sinh(y) / y;
        double s_over_sinh;
        if (x < 1.0) {
            s_over_sinh = 1.0 / (r_b * (x < 1e-4 ? 1.0 + x * x / 6.0 : std::sinh(x) / x));
        } else {
            const double e = std::exp(-x);
            s_over_sinh = s * 2.0 * e / (1.0 - e * e);
        }
        return shc_y * s_over_sinh;
    }
    return sinh_ratio(y, x) / r;
}

// (R^3 - r_b^3) / (3 D) / (x cosh x - sinh x), x = sqrt(lambda_hat) r_b, times sinh x.
// Returned without the sinh factor so callers choose the radial profile.
double interior_amplitude(const Geometry& geom, double lambda_hat) {
    const double x = std::sqrt(lambda_hat) * geom.r_b;
    const double vol = (geom.R * geom.R * geom.R - geom.r_b * geom.r_b * geom.r_b) / (3.0 * geom.D);
    // (x cosh x - sinh x) / sinh x = x coth x - 1
    return vol / (x * x * xcoth_minus_one_over_square(x));
}

}  // namespace

std::size_t modes_needed(const Geometry& geom, double t_min, const Truncation& truncation) {
    geom.validate();
    if (!(t_min > 0.0)) throw DomainError("modes_needed: t_min must be positive");
    const double log_ratio = std::log(kTermBound / truncation.term_tol);
    const double mu_max = std::max(log_ratio, 1.0) / (geom.D * t_min);
    const double n = geom.gap() * std::sqrt(mu_max) / std::numbers::pi + 8.0;
    return std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(n)), 1, truncation.max_modes);
}

SpectralSolution::SpectralSolution(ModeSet modes, double r0, SolutionOptions options)
    : modes_(std::move(modes)), r0_(r0), options_(options) {}

SpectralSolution SpectralSolution::smoluchowski(const Geometry& geom, double r0, SolutionOptions options) {
    geom.validate();
    require_source(geom, r0);
    const std::size_t count = modes_needed(geom, options.t_min, options.truncation);
    SpectralSolution sol(smol_eigenvalues(geom, count), r0, options);
    sol.fill_coefficients([r0](const ModeSet& set, const EigenMode& m) {
        return eigenfunction(set, m, r0);
    });
    return sol;
}

SpectralSolution SpectralSolution::doi(const Geometry& geom, double lambda, double r0, SolutionOptions options) {
    geom.validate();
    require_source(geom, r0);
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw DomainError("doi solution: lambda must be finite and non-negative");
    }
    const std::size_t count = modes_needed(geom, options.t_min, options.truncation);
    SpectralSolution sol(doi_eigenvalues(geom, lambda / geom.D, count), r0, options);
    sol.fill_coefficients([r0](const ModeSet& set, const EigenMode& m) {
        return eigenfunction(set, m, r0);
    });
    return sol;
}

SpectralSolution SpectralSolution::with_initial_data(ModeSet modes, const InnerProduct& initial,
                                                     SolutionOptions options) {
    modes.geometry.validate();
    for (const auto& m : modes.modes) {
        if (!(m.norm_const > 0.0)) {
            throw DomainError("with_initial_data: mode set lacks normalization constants");
        }
    }
    SpectralSolution sol(std::move(modes), std::numeric_limits<double>::quiet_NaN(), options);
    sol.fill_coefficients(initial);
    return sol;
}

void SpectralSolution::fill_coefficients(const InnerProduct& initial) {
    const std::size_t n = modes_.count();
    weights_.resize(n);
    moments_.resize(n);
    decay_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const EigenMode& m = modes_.modes[i];
        weights_[i] = m.norm_const * initial(modes_, m);
        moments_[i] = mode_moment(modes_, m);
        decay_[i] = modes_.geometry.D * m.value;
    }
}

void SpectralSolution::check_time(double t) const {
    if (!(t >= kMinTime) || !std::isfinite(t)) {
        std::ostringstream msg;
        msg << "time " << t << " s below the supported minimum " << kMinTime << " s";
        throw DomainError(msg.str());
    }
}

std::vector<double> SpectralSolution::profile(double r) const {
    const double scale = options_.scale_4pi ? 1.0 / kFourPi : 1.0;
    std::vector<double> out(modes_.count());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = scale * weights_[i] * eigenfunction(modes_, modes_.modes[i], r);
    }
    return out;
}

SeriesValue SpectralSolution::density_from_profile(std::span<const double> profile, double t) const {
    check_time(t);
    SeriesValue out;
    out.slow_convergence = t < kSlowSeriesTime;
    CompensatedSum sum;
    const std::size_t n = std::min(profile.size(), decay_.size());
    const std::size_t limit = std::min(n, options_.truncation.max_modes);
    int small = 0;
    for (std::size_t i = 0; i < limit; ++i) {
        const double term = profile[i] * std::exp(-decay_[i] * t);
        sum.add(term);
        out.last_term = std::abs(term);
        // two small terms in a row, so a node of one eigenfunction does not end the sum
        small = std::abs(term) < options_.truncation.term_tol ? small + 1 : 0;
        if (small == 2) {
            out.value = sum.value();
            out.terms = i + 1;
            return out;
        }
    }
    out.value = sum.value();
    out.terms = limit;
    out.truncated = true;
    return out;
}

SeriesValue SpectralSolution::density(double r, double t) const {
    check_time(t);
    const auto p = profile(r);
    return density_from_profile(p, t);
}

SeriesValue SpectralSolution::survival(double t) const {
    check_time(t);
    SeriesValue out;
    out.slow_convergence = t < kSlowSeriesTime;
    CompensatedSum sum;
    const std::size_t limit = std::min(decay_.size(), options_.truncation.max_modes);
    int small = 0;
    for (std::size_t i = 0; i < limit; ++i) {
        const double term = weights_[i] * moments_[i] * std::exp(-decay_[i] * t);
        sum.add(term);
        out.last_term = std::abs(term);
        // two small terms in a row, so a node of one eigenfunction does not end the sum
        small = std::abs(term) < options_.truncation.term_tol ? small + 1 : 0;
        if (small == 2) {
            out.value = sum.value();
            out.terms = i + 1;
            return out;
        }
    }
    out.value = sum.value();
    out.terms = limit;
    out.truncated = true;
    return out;
}

SeriesValue SpectralSolution::cdf(double t) const {
    SeriesValue s = survival(t);
    s.value = 1.0 - s.value;
    return s;
}

SeriesValue density_smol(const SpectralSolution& sol, double r, double t) {
    if (sol.model() != Model::Smoluchowski) throw DomainError("density_smol: not a Smoluchowski solution");
    return sol.density(r, t);
}

SeriesValue density_doi(const SpectralSolution& sol, double r, double t) {
    if (sol.model() != Model::Doi) throw DomainError("density_doi: not a Doi solution");
    return sol.density(r, t);
}

SeriesValue cdf(const SpectralSolution& sol, double t) { return sol.cdf(t); }

double mean_binding_smol(const Geometry& geom, double r0) {
    geom.validate();
    if (!(r0 >= geom.r_b && r0 <= geom.R)) {
        throw DomainError("mean_binding_smol: r0 must lie in [r_b, R]");
    }
    const double D = geom.D, R = geom.R, rb = geom.r_b;
    return (rb * rb - r0 * r0) / (6.0 * D) + (R * R * R / (3.0 * D)) * (1.0 / rb - 1.0 / r0);
}

double mean_binding_doi(const Geometry& geom, double lambda, double r0) {
    geom.validate();
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("mean_binding_doi: lambda must be positive");
    if (!(r0 >= 0.0 && r0 <= geom.R)) throw DomainError("mean_binding_doi: r0 must lie in [0, R]");
    const double lambda_hat = lambda / geom.D;
    const double amp = interior_amplitude(geom, lambda_hat);
    if (r0 < geom.r_b) {
        // u^-(r0) = 1/lambda + sinh(s r0)/r0 * vol / (x cosh x - sinh x)
        const double s = std::sqrt(lambda_hat);
        return 1.0 / lambda + amp * interior_sinh_profile(s, r0, geom.r_b);
    }
    return mean_binding_smol(geom, r0) + 1.0 / lambda + amp / geom.r_b;
}

double mean_diff(const Geometry& geom, double lambda, double r0) {
    geom.validate();
    if (!(r0 > geom.r_b && r0 <= geom.R)) throw DomainError("mean_diff: r0 must lie in (r_b, R]");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("mean_diff: lambda must be positive");
    const double lambda_hat = lambda / geom.D;
    // 1/(D lambda_hat) + (sinh x / r_b) vol / (x cosh x - sinh x)
    return std::abs(1.0 / (geom.D * lambda_hat) + interior_amplitude(geom, lambda_hat) / geom.r_b);
}

double rel_diff(const Geometry& geom, double lambda, double r0) {
    return mean_diff(geom, lambda, r0) / mean_binding_smol(geom, r0);
}

}  // namespace doismol
