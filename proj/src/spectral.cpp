#include "doismol/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace doismol {

namespace {

constexpr double kPi = std::numbers::pi;

double shc(double x) noexcept {
    if (std::abs(x) < 1e-4) return 1.0 + x * x / 6.0;
    return std::sinh(x) / x;
}

// 1/sinh(x) for x > 0, no overflow in the intermediate.
double inv_sinh(double x) noexcept {
    if (x < 1.0) return 1.0 / std::sinh(x);
    const double e = std::exp(-x);
    return 2.0 * e / (1.0 - e * e);
}

// (1 - sin(y)/y) / y^2
double one_minus_sinc_over_square(double y) noexcept {
    const double y2 = y * y;
    if (std::abs(y) < 0.5) {
        return 1.0 / 6.0 -
               y2 * (1.0 / 120.0 -
                     y2 * (1.0 / 5040.0 -
                           y2 * (1.0 / 362880.0 - y2 * (1.0 / 39916800.0 - y2 / 6227020800.0))));
    }
    return one_minus_sinc(y) / y2;
}

void require_radius(const Geometry& geom, double r) {
    if (!(r >= 0.0 && r <= geom.R)) {
        std::ostringstream msg;
        msg << "radius " << r << " outside [0, " << geom.R << "]";
        throw DomainError(msg.str());
    }
}

// Interior amplitude K' of the Doi mode above lambda_hat, psi_in(r) = K' sinc(q r).
double upper_interior_amplitude(const Geometry& geom, double k, double x) {
    const double cx = std::cos(x);
    if (std::abs(cx) >= 0.5) {
        return -smol_denominator(geom, k) / geom.R / cx;
    }
    return -smol_numerator(geom, k) / geom.R / (geom.r_b * sinc(x));
}

double sign_of(double v) noexcept { return (v > 0.0) - (v < 0.0); }

std::vector<double> smol_roots_k(const Geometry& geom, std::size_t count) {
    const double c = geom.gap();
    std::vector<double> ks;
    ks.reserve(count);
    auto f = [&](double k) { return smol_numerator(geom, k); };
    for (std::size_t n = 1; n <= count; ++n) {
        const double lo = n == 1 ? 0.0 : (2.0 * n - 3.0) * kPi / (2.0 * c);
        const double hi = (2.0 * n - 1.0) * kPi / (2.0 * c);
        ks.push_back(find_root(f, Bracket::make(f, lo, hi), kRootRelTol));
    }
    return ks;
}

std::vector<double> pole_roots_k(const Geometry& geom, std::size_t count) {
    const double c = geom.gap();
    std::vector<double> ks;
    ks.reserve(count);
    auto f = [&](double k) { return smol_denominator(geom, k); };
    for (std::size_t n = 1; n <= count; ++n) {
        const double lo = (2.0 * n - 1.0) * kPi / (2.0 * c);
        const double hi = n * kPi / c;
        ks.push_back(find_root(f, Bracket::make(f, lo, hi), kRootRelTol));
    }
    return ks;
}

ModeSet make_set(const Geometry& geom, Model model, double lambda_hat,
                 const std::vector<double>& values) {
    ModeSet set;
    set.geometry = geom;
    set.model = model;
    set.lambda_hat = lambda_hat;
    set.modes.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        set.modes.push_back(EigenMode{i + 1, values[i], 0.0});
    }
    return set;
}

// Doi roots in k = sqrt(mu); `scan_step` is the k-spacing above lambda_hat.
std::vector<double> doi_roots(const Geometry& geom, double lambda_hat, std::size_t count,
                              const std::vector<double>& k_alpha, const std::vector<double>& k_beta,
                              double scan_step) {
    auto F = [&](double k) { return doi_matching(geom, k * k, lambda_hat); };
    const double k_seam = std::sqrt(lambda_hat);
    std::vector<double> roots;
    roots.reserve(count);

    if (lambda_hat == 0.0) {
        roots.push_back(0.0);  // constant mode
    } else {
        for (std::size_t n = 1; n <= count; ++n) {
            const double lo = n == 1 ? 0.0 : k_beta[n - 2];
            const double hi = k_alpha[n - 1];
            if (hi <= k_seam) {
                roots.push_back(find_root(F, Bracket::make(F, lo, hi), kRootRelTol));
                continue;
            }
            if (lo < k_seam) {
                const Bracket b{lo, k_seam, F(lo), F(k_seam)};
                if (b.valid()) roots.push_back(find_root(F, b, kRootRelTol));
            }
            break;
        }
    }
    if (roots.size() >= count) return roots;

    // Above the seam: sign-change scan. mu_n <= alpha_n bounds the search.
    const double k_ceiling = k_alpha[count - 1] * (1.0 + 1e-9) + scan_step;
    double k_prev = roots.empty() ? k_seam : std::max(k_seam, roots.back());
    if (lambda_hat == 0.0) k_prev = 0.5 * scan_step;
    double f_prev = F(k_prev);
    while (roots.size() < count && k_prev < k_ceiling) {
        const double k_cur = k_prev + scan_step;
        const double f_cur = F(k_cur);
        if (f_cur == 0.0) {
            roots.push_back(k_cur);
            k_prev = k_cur + 1e-3 * scan_step;
            f_prev = F(k_prev);
            continue;
        }
        if (sign_of(f_prev) * sign_of(f_cur) < 0.0) {
            roots.push_back(find_root(F, Bracket{k_prev, k_cur, f_prev, f_cur}, kRootRelTol));
        }
        k_prev = k_cur;
        f_prev = f_cur;
    }
    return roots;
}

}  // namespace

void Geometry::validate() const {
    if (!(r_b > 0.0) || !(R > r_b) || !std::isfinite(R)) {
        std::ostringstream msg;
        msg << "invalid geometry: need 0 < r_b < R (r_b = " << r_b << ", R = " << R << ")";
        throw DomainError(msg.str());
    }
    if (!(D > 0.0) || !std::isfinite(D)) {
        std::ostringstream msg;
        msg << "invalid geometry: need D > 0 (D = " << D << ")";
        throw DomainError(msg.str());
    }
}

std::string to_string(Model m) {
    return m == Model::Smoluchowski ? "smoluchowski" : "doi";
}

std::vector<double> ModeSet::values() const {
    std::vector<double> v;
    v.reserve(modes.size());
    for (const auto& m : modes) v.push_back(m.value);
    return v;
}

double smol_numerator(const Geometry& geom, double k) noexcept {
    const double c = geom.gap();
    const double y = k * c;
    const double s = std::sin(0.5 * y);
    // R cos(y) - c sinc(y) rewritten around its k = 0 value r_b.
    return geom.r_b - 2.0 * geom.R * s * s + c * one_minus_sinc(y);
}

double smol_denominator(const Geometry& geom, double k) noexcept {
    const double y = k * geom.gap();
    return geom.R * k * std::sin(y) + std::cos(y);
}

double f_smol(const Geometry& geom, double mu) {
    if (!(mu >= 0.0)) throw DomainError("f_smol: mu must be non-negative");
    const double k = std::sqrt(mu);
    const double den = smol_denominator(geom, k);
    if (std::abs(den) < 1e-300) {
        std::ostringstream msg;
        msg << "f_smol: pole at mu = " << mu;
        throw PoleError(msg.str());
    }
    return smol_numerator(geom, k) / den;
}

double reaction_kernel_A(const Geometry& geom, double mu, double lambda_hat) {
    if (!(mu >= 0.0)) throw DomainError("reaction_kernel_A: mu must be non-negative");
    if (!(lambda_hat >= 0.0)) throw DomainError("reaction_kernel_A: lambda_hat must be non-negative");
    if (mu <= lambda_hat) {
        return geom.r_b * tanhc(std::sqrt(lambda_hat - mu) * geom.r_b);
    }
    const double x = std::sqrt(mu - lambda_hat) * geom.r_b;
    if (std::abs(std::cos(x)) < 1e-12) {
        std::ostringstream msg;
        msg << "reaction_kernel_A: tan-branch pole at mu = " << mu;
        throw PoleError(msg.str());
    }
    return geom.r_b * tanc(x);
}

double doi_matching(const Geometry& geom, double mu, double lambda_hat) {
    const double k = std::sqrt(mu);
    const double num = smol_numerator(geom, k);
    const double den = smol_denominator(geom, k);
    if (mu <= lambda_hat) {
        return num - geom.r_b * tanhc(std::sqrt(lambda_hat - mu) * geom.r_b) * den;
    }
    const double x = std::sqrt(mu - lambda_hat) * geom.r_b;
    return std::cos(x) * num - geom.r_b * sinc(x) * den;
}

std::vector<double> smol_poles(const Geometry& geom, std::size_t count) {
    geom.validate();
    std::vector<double> ks = pole_roots_k(geom, count);
    for (double& k : ks) k *= k;
    return ks;
}

std::vector<double> neumann_ball_eigenvalues(double R, std::size_t count) {
    if (!(R > 0.0)) throw DomainError("neumann_ball_eigenvalues: R must be positive");
    std::vector<double> out;
    out.reserve(count);
    if (count == 0) return out;
    out.push_back(0.0);
    // sin(y) - y cos(y) = 0 on ((n-1) pi, (n - 1/2) pi)
    auto g = [](double y) { return std::sin(y) - y * std::cos(y); };
    for (std::size_t n = 2; n <= count; ++n) {
        const double lo = (n - 1.0) * kPi;
        const double y = find_root(g, Bracket::make(g, lo, lo + 0.5 * kPi), kRootRelTol);
        out.push_back((y / R) * (y / R));
    }
    return out;
}

ModeSet smol_eigenvalues(const Geometry& geom, std::size_t count) {
    geom.validate();
    if (count == 0) throw DomainError("smol_eigenvalues: count must be >= 1");
    std::vector<double> ks = smol_roots_k(geom, count);
    for (double& k : ks) k *= k;
    return mode_norms(geom, make_set(geom, Model::Smoluchowski, 0.0, ks));
}

ModeSet doi_eigenvalues(const Geometry& geom, double lambda_hat, std::size_t count) {
    geom.validate();
    if (count == 0) throw DomainError("doi_eigenvalues: count must be >= 1");
    if (!(lambda_hat >= 0.0) || !std::isfinite(lambda_hat)) {
        throw DomainError("doi_eigenvalues: lambda_hat must be finite and non-negative");
    }
    const std::vector<double> k_alpha = smol_roots_k(geom, count);
    const std::vector<double> k_beta = pole_roots_k(geom, count);
    const std::vector<double> gamma = neumann_ball_eigenvalues(geom.R, count);

    double step = kPi / (32.0 * geom.R);
    std::vector<double> roots;
    bool consistent = false;
    for (int attempt = 0; attempt < 4 && !consistent; ++attempt, step *= 0.25) {
        roots = doi_roots(geom, lambda_hat, count, k_alpha, k_beta, step);
        consistent = true;
        for (std::size_t i = 0; i < roots.size(); ++i) {
            const double mu = roots[i] * roots[i];
            const double alpha = k_alpha[i] * k_alpha[i];
            const bool ordered = i == 0 || roots[i] > roots[i - 1];
            if (!ordered || mu > alpha * (1.0 + 1e-12) || mu < gamma[i] * (1.0 - 1e-12)) {
                consistent = false;
                break;
            }
        }
    }
    if (!consistent) {
        throw NumericsError("doi_eigenvalues: scan could not isolate the spectrum consistently");
    }
    for (double& k : roots) k *= k;
    ModeSet set = mode_norms(geom, make_set(geom, Model::Doi, lambda_hat, roots));
    if (set.count() < count) {
        set.partial = true;
        std::ostringstream msg;
        msg << "doi_eigenvalues: found " << set.count() << " of " << count
            << " modes below the scan ceiling";
        throw ExhaustionError(msg.str(), std::move(set));
    }
    return set;
}

double outer_profile(const Geometry& geom, double z, double r) {
    const double k = std::sqrt(z);
    const double s = geom.R - r;
    return ((s / geom.R) * sinc(k * s) - std::cos(k * s)) / r;
}

double phi(const Geometry& geom, double alpha_n, double r) {
    require_radius(geom, r);
    if (r < geom.r_b) return 0.0;
    return outer_profile(geom, alpha_n, r);
}

double psi(const Geometry& geom, double lambda_hat, double mu_n, double r) {
    require_radius(geom, r);
    if (r >= geom.r_b) return outer_profile(geom, mu_n, r);

    const double k = std::sqrt(mu_n);
    const double u_b = -smol_numerator(geom, k) / geom.R;  // r * psi at r_b
    if (mu_n < lambda_hat) {
        const double q = std::sqrt(lambda_hat - mu_n);
        const double x = q * geom.r_b;
        if (q * r < 1.0) {
            // sinh(q r)/(r sinh x) = shc(q r) q / sinh(x)
            const double q_over_sinh = x < 1.0 ? 1.0 / (geom.r_b * shc(x)) : q * inv_sinh(x);
            return u_b * shc(q * r) * q_over_sinh;
        }
        return u_b * sinh_ratio(q * r, x) / r;
    }
    if (mu_n > lambda_hat) {
        const double q = std::sqrt(mu_n - lambda_hat);
        const double x = q * geom.r_b;
        return upper_interior_amplitude(geom, k, x) * sinc(q * r);
    }
    return u_b / geom.r_b;
}

double outer_norm_sq(const Geometry& geom, double z) {
    if (!(z >= 0.0)) throw DomainError("outer_norm_sq: z must be non-negative");
    const double R = geom.R, c = geom.gap();
    const double y = std::sqrt(z) * c;
    const double sy = sinc(y);
    return (c * c * c / (R * R)) * 2.0 * one_minus_sinc_over_square(2.0 * y) -
           (c * c / R) * sy * sy + 0.5 * c * (1.0 + sinc(2.0 * y));
}

double inner_norm_sq(const Geometry& geom, double lambda_hat, double mu_n) {
    const double k = std::sqrt(mu_n);
    const double u_b = -smol_numerator(geom, k) / geom.R;
    if (mu_n < lambda_hat) {
        const double x = std::sqrt(lambda_hat - mu_n) * geom.r_b;
        return u_b * u_b * geom.r_b * sinh_square_moment(x);
    }
    if (mu_n > lambda_hat) {
        const double x = std::sqrt(mu_n - lambda_hat) * geom.r_b;
        const double amp = upper_interior_amplitude(geom, k, x);
        const double rb3 = geom.r_b * geom.r_b * geom.r_b;
        return amp * amp * rb3 * 2.0 * one_minus_sinc_over_square(2.0 * x);
    }
    return u_b * u_b * geom.r_b / 3.0;
}

double outer_moment(const Geometry& geom, double z) {
    if (!(z >= 0.0)) throw DomainError("outer_moment: z must be non-negative");
    const double c = geom.gap();
    const double y = std::sqrt(z) * c;
    return -(c * c * c / geom.R) * sin_minus_ycos_over_cube(y) - c * geom.r_b * sinc(y);
}

double inner_moment(const Geometry& geom, double lambda_hat, double mu_n) {
    const double k = std::sqrt(mu_n);
    const double rb2 = geom.r_b * geom.r_b;
    const double u_b = -smol_numerator(geom, k) / geom.R;
    if (mu_n < lambda_hat) {
        const double x = std::sqrt(lambda_hat - mu_n) * geom.r_b;
        return u_b * rb2 * xcoth_minus_one_over_square(x);
    }
    if (mu_n > lambda_hat) {
        const double x = std::sqrt(mu_n - lambda_hat) * geom.r_b;
        return upper_interior_amplitude(geom, k, x) * rb2 * geom.r_b * sin_minus_ycos_over_cube(x);
    }
    return u_b * rb2 / 3.0;
}

double mode_moment(const ModeSet& set, const EigenMode& mode) {
    const double outer = outer_moment(set.geometry, mode.value);
    if (set.model == Model::Smoluchowski) return outer;
    return outer + inner_moment(set.geometry, set.lambda_hat, mode.value);
}

ModeSet mode_norms(const Geometry& geom, ModeSet set) {
    for (auto& m : set.modes) {
        double norm_sq = outer_norm_sq(geom, m.value);
        if (set.model == Model::Doi) norm_sq += inner_norm_sq(geom, set.lambda_hat, m.value);
        m.norm_const = 1.0 / norm_sq;
    }
    return set;
}

double eigenfunction(const ModeSet& set, const EigenMode& mode, double r) {
    if (set.model == Model::Smoluchowski) return phi(set.geometry, mode.value, r);
    return psi(set.geometry, set.lambda_hat, mode.value, r);
}

}  // namespace doismol
