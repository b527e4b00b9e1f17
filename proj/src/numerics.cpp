#include "doismol/numerics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace doismol {

namespace {

double checked(const ScalarFunction& f, double x) {
    const double v = f(x);
    if (std::isnan(v)) {
        std::ostringstream msg;
        msg << "function evaluated to NaN at x = " << x;
        throw EvaluationError(msg.str());
    }
    return v;
}

bool same_strict_sign(double a, double b) noexcept {
    return (a > 0.0 && b > 0.0) || (a < 0.0 && b < 0.0);
}

}  // namespace

Bracket Bracket::make(const ScalarFunction& f, double lo, double hi) {
    Bracket b{lo, hi, checked(f, lo), checked(f, hi)};
    if (!b.valid()) {
        std::ostringstream msg;
        msg << "no sign change on [" << lo << ", " << hi << "]: f(lo) = " << b.f_lo
            << ", f(hi) = " << b.f_hi;
        throw BracketError(msg.str());
    }
    return b;
}

bool Bracket::valid() const noexcept {
    return lo < hi && !same_strict_sign(f_lo, f_hi);
}

double find_root(const ScalarFunction& f, const Bracket& bracket, double rel_tol) {
    if (!bracket.valid()) {
        std::ostringstream msg;
        msg << "invalid bracket [" << bracket.lo << ", " << bracket.hi << "]";
        throw BracketError(msg.str());
    }
    if (std::isnan(bracket.f_lo) || std::isnan(bracket.f_hi)) {
        throw EvaluationError("NaN at bracket endpoint");
    }
    rel_tol = std::max(rel_tol, 4.0 * std::numeric_limits<double>::epsilon());

    double lo = bracket.lo, hi = bracket.hi;
    double flo = bracket.f_lo, fhi = bracket.f_hi;
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;

    // Illinois bookkeeping: which end was retained last time.
    int retained = 0;
    for (int iter = 0; iter < 400; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= rel_tol * std::max(1.0, std::abs(mid))) return mid;

        double x = mid;
        if (iter % 2 == 0) {
            const double secant = hi - fhi * (hi - lo) / (fhi - flo);
            if (std::isfinite(secant) && secant > lo && secant < hi) x = secant;
        }
        const double fx = checked(f, x);
        if (fx == 0.0) return x;

        if (same_strict_sign(fx, flo)) {
            lo = x;
            flo = fx;
            if (retained == +1) fhi *= 0.5;
            retained = +1;
        } else {
            hi = x;
            fhi = fx;
            if (retained == -1) flo *= 0.5;
            retained = -1;
        }
    }
    return 0.5 * (lo + hi);
}

double integrate(const ScalarFunction& f, double a, double b, double abs_tol) {
    if (!(a <= b)) throw DomainError("integrate: requires a <= b");
    if (a == b) return 0.0;
    if (!(abs_tol > 0.0)) throw DomainError("integrate: abs_tol must be positive");

    using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
    constexpr unsigned max_depth = 15;
    auto g = [&](double x) { return checked(f, x); };

    // Non-adaptive pass gives the L1 scale needed to turn the absolute
    // tolerance into boost's relative one.
    double l1 = 0.0;
    double error = 0.0;
    Rule::integrate(g, a, b, 0, 0.0, &error, &l1);
    const double rel = std::max(abs_tol / std::max(l1, std::numeric_limits<double>::min()),
                                std::numeric_limits<double>::epsilon());
    const double value = Rule::integrate(g, a, b, max_depth, rel, &error, &l1);
    if (!(error <= abs_tol)) {
        std::ostringstream msg;
        msg << "quadrature on [" << a << ", " << b << "] reached depth " << max_depth
            << " with error estimate " << error << " > " << abs_tol;
        throw AccuracyError(msg.str());
    }
    return value;
}

double sinh_ratio(double a, double b) {
    if (!(b > 0.0)) throw DomainError("sinh_ratio: b must be positive");
    if (!(a >= 0.0 && a <= b)) throw DomainError("sinh_ratio: requires 0 <= a <= b");
    if (a == 0.0) return 0.0;
    // exp(a - b) (1 - e^{-2a}) / (1 - e^{-2b})
    return std::exp(a - b) * (std::expm1(-2.0 * a) / std::expm1(-2.0 * b));
}

double sinc(double y) noexcept {
    if (std::abs(y) < 1e-4) return 1.0 - y * y / 6.0;
    return std::sin(y) / y;
}

double one_minus_sinc(double y) noexcept {
    const double y2 = y * y;
    if (std::abs(y) < 0.25) {
        // y^2/3! - y^4/5! + y^6/7! - y^8/9! + y^10/11!
        return y2 * (1.0 / 6.0 -
                     y2 * (1.0 / 120.0 -
                           y2 * (1.0 / 5040.0 - y2 * (1.0 / 362880.0 - y2 / 39916800.0))));
    }
    return 1.0 - std::sin(y) / y;
}

double sin_minus_ycos_over_cube(double y) noexcept {
    const double y2 = y * y;
    if (std::abs(y) < 0.25) {
        // sum_{m>=1} (-1)^{m+1} 2m y^{2m-2} / (2m+1)!
        return 1.0 / 3.0 -
               y2 * (4.0 / 120.0 -
                     y2 * (6.0 / 5040.0 - y2 * (8.0 / 362880.0 - y2 * (10.0 / 39916800.0))));
    }
    return (std::sin(y) - y * std::cos(y)) / (y2 * y);
}

double tanhc(double x) noexcept {
    if (std::abs(x) < 1e-4) return 1.0 - x * x / 3.0;
    return std::tanh(x) / x;
}

double tanc(double x) noexcept {
    if (std::abs(x) < 1e-4) return 1.0 + x * x / 3.0;
    return std::tan(x) / x;
}

double xcoth_minus_one_over_square(double x) noexcept {
    x = std::abs(x);
    const double x2 = x * x;
    if (x < 0.25) {
        // x coth x = 1 + x^2/3 - x^4/45 + 2x^6/945 - x^8/4725 + 2x^10/93555
        return 1.0 / 3.0 -
               x2 * (1.0 / 45.0 - x2 * (2.0 / 945.0 - x2 * (1.0 / 4725.0 - x2 * (2.0 / 93555.0))));
    }
    return (x / std::tanh(x) - 1.0) / x2;
}

double sinh_square_moment(double x) noexcept {
    x = std::abs(x);
    if (x < 0.25) {
        // (sinh 2x - 2x)/(4x) = x^2/3 + x^4/15 + 2x^6/315 + x^8/2835 + 2x^10/155925
        const double x2 = x * x;
        const double num =
            1.0 / 3.0 + x2 * (1.0 / 15.0 + x2 * (2.0 / 315.0 + x2 * (1.0 / 2835.0 + x2 * (2.0 / 155925.0))));
        const double s = std::sinh(x) / x;
        return num / (s * s);
    }
    // coth(x)/(2x) - 1/(2 sinh^2 x), with 1/sinh^2 written in e^{-2x}.
    const double e = std::exp(-2.0 * x);
    const double inv_sinh2 = 4.0 * e / ((1.0 - e) * (1.0 - e));
    return 1.0 / (2.0 * x * std::tanh(x)) - 0.5 * inv_sinh2;
}

void CompensatedSum::add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
        carry_ += (sum_ - t) + v;
    } else {
        carry_ += (v - t) + sum_;
    }
    sum_ = t;
}

SlopeFit loglog_slope(std::span<const std::pair<double, double>> points) {
    if (points.size() < 2) throw DomainError("loglog_slope: need at least two points");
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : points) {
        if (!(x > 0.0) || !(y > 0.0)) {
            throw DomainError("loglog_slope: coordinates must be positive");
        }
        mx += std::log(x);
        my += std::log(y);
    }
    const double n = static_cast<double>(points.size());
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : points) {
        const double dx = std::log(x) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(y) - my);
    }
    if (!(sxx > 0.0)) throw DomainError("loglog_slope: x values are all equal");

    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.n_points = points.size();
    double ss = 0.0;
    for (const auto& [x, y] : points) {
        const double r = std::log(y) - (fit.intercept + fit.slope * std::log(x));
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / n);
    return fit;
}

}  // namespace doismol
