#include <doctest.h>

#include "doismol/spectral.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

using namespace doismol;

namespace {

const double kPi = std::numbers::pi;

// Second-order centred difference of the radial Laplacian u'' + 2u'/r.
template <typename F>
double radial_laplacian(F&& u, double r, double h) {
    const double up = u(r + h), um = u(r - h), u0 = u(r);
    return (up - 2.0 * u0 + um) / (h * h) + (up - um) / (h * r);
}

template <typename F>
double max_abs(F&& u, double a, double b, int n = 2000) {
    double m = 0.0;
    for (int i = 0; i <= n; ++i) m = std::max(m, std::abs(u(a + (b - a) * i / n)));
    return m;
}

struct DoiCase {
    double r_b;
    double lambda_hat;
};

const std::vector<DoiCase> kDoiCases{{1e-2, 1e6}, {0.1, 100.0}, {0.1, 1e4}, {1e-3, 1e8}, {1e-3, 1e10}, {0.3, 50.0}};

}  // namespace

TEST_CASE("geometry validation") {
    CHECK_NOTHROW(Geometry{}.validate());
    CHECK_THROWS_AS((Geometry{2.0, 1.0, 10.0}.validate()), DomainError);
    CHECK_THROWS_AS((Geometry{0.0, 1.0, 10.0}.validate()), DomainError);
    CHECK_THROWS_AS((Geometry{0.1, 1.0, 0.0}.validate()), DomainError);
}

TEST_CASE("f_smol basics") {
    const Geometry g{1e-3, 1.0, 10.0};
    CHECK(f_smol(g, 1e-12) == doctest::Approx(g.r_b).epsilon(1e-6));
    const ModeSet s = smol_eigenvalues(g, 3);
    CHECK(std::abs(f_smol(g, s.modes[0].value)) < 1e-10);

    const double beta1 = smol_poles(g, 1)[0];
    const double below = f_smol(g, beta1 * (1.0 - 1e-6));
    const double above = f_smol(g, beta1 * (1.0 + 1e-6));
    CHECK(below < 0.0);
    CHECK(above > 0.0);

    // matches the tan form away from poles
    for (double mu : {0.5, 3.0, 17.0, 123.0}) {
        CHECK(f_smol(g, mu) == doctest::Approx(static_cast<double>(oracle::f_original(g, mu))).epsilon(1e-10));
    }
}

TEST_CASE("f decreasing where positive") {
    const Geometry g{0.05, 1.0, 10.0};
    int checked = 0;
    for (int i = 1; i < 400; ++i) {
        const double mu = 0.25 * i;
        const double f = static_cast<double>(oracle::f_original(g, mu));
        if (!(f > 0.0) || f > 1e3) continue;
        const double h = 1e-6 * mu;
        const double fp = static_cast<double>(oracle::f_original(g, mu + h));
        const double fm = static_cast<double>(oracle::f_original(g, mu - h));
        if (!(fp > 0.0 && fm > 0.0)) continue;
        CHECK((fp - fm) / (2.0 * h) < 0.0);
        ++checked;
    }
    CHECK(checked > 50);
}

TEST_CASE("reaction kernel A") {
    const Geometry g{0.1, 1.0, 10.0};
    const double lh = 400.0;
    CHECK(reaction_kernel_A(g, 0.0, lh) ==
          doctest::Approx(std::tanh(std::sqrt(lh) * g.r_b) / std::sqrt(lh)).epsilon(1e-14));
    CHECK(reaction_kernel_A(g, lh, lh) == doctest::Approx(g.r_b).epsilon(1e-14));
    CHECK(reaction_kernel_A(g, lh * (1 - 1e-12), lh) == doctest::Approx(g.r_b).epsilon(1e-10));
    CHECK(reaction_kernel_A(g, lh * (1 + 1e-12), lh) == doctest::Approx(g.r_b).epsilon(1e-10));

    const Geometry small{1e-3, 1.0, 10.0};
    const double ratio = reaction_kernel_A(small, 5.0, 1e8) / reaction_kernel_A(small, 5.0, 1e10);
    CHECK(ratio == doctest::Approx(10.0).epsilon(1e-3));

    double prev = -1.0;
    for (int i = 0; i <= 100; ++i) {
        const double a = reaction_kernel_A(g, 0.5 * lh * i / 100.0, lh);
        CHECK(a > prev);
        prev = a;
    }

    for (double mu : {1.0, 50.0, 399.0, 401.0, 900.0}) {
        CHECK(reaction_kernel_A(g, mu, lh) ==
              doctest::Approx(static_cast<double>(oracle::a_original(g, mu, lh))).epsilon(1e-12));
    }
    // tan branch pole at sqrt(mu - lh) r_b = pi / 2
    const double pole = lh + std::pow(kPi / 2.0 / g.r_b, 2);
    CHECK_THROWS_AS(reaction_kernel_A(g, pole, lh), PoleError);
}

TEST_CASE("Smoluchowski eigenvalues against the tan-form oracle") {
    for (double rb : {1e-3, 1e-2, 0.1, 0.5}) {
        const Geometry g{rb, 1.0, 10.0};
        const ModeSet s = smol_eigenvalues(g, 50);
        const auto ref = oracle::smol_eigenvalues(g, 50);
        REQUIRE(ref.size() == 50);
        REQUIRE(s.count() == 50);
        for (std::size_t i = 0; i < 50; ++i) {
            CAPTURE(rb);
            CAPTURE(i);
            CHECK(s.modes[i].value == doctest::Approx(ref[i]).epsilon(1e-12));
            CHECK(s.modes[i].n == i + 1);
            CHECK(s.modes[i].norm_const > 0.0);
            const double f = f_smol(g, s.modes[i].value);
            CHECK(std::abs(f) <= 1e-9);
        }
    }
}

TEST_CASE("alpha_1 asymptote") {
    const Geometry g{1e-3, 1.0, 10.0};
    const double a1 = smol_eigenvalues(g, 1).modes[0].value;
    CHECK(a1 == doctest::Approx(3.0 * g.r_b / std::pow(g.R, 3)).epsilon(0.05));
    const double kappa = g.kappa();
    CHECK(a1 == doctest::Approx(3.0 * (1 - kappa) / std::pow(kappa, 3)).epsilon(2e-3));
}

TEST_CASE("Smoluchowski interlacing with the poles") {
    const Geometry g{1e-3, 1.0, 10.0};
    const auto a = smol_eigenvalues(g, 21).values();
    const auto b = smol_poles(g, 20);
    const auto b_ref = oracle::smol_poles(g, 20);
    REQUIRE(b_ref.size() == 20);
    for (std::size_t i = 0; i < 20; ++i) {
        CHECK(b[i] == doctest::Approx(b_ref[i]).epsilon(1e-12));
        CHECK(a[i] < b[i]);
        CHECK(b[i] < a[i + 1]);
    }
}

TEST_CASE("eigenvalue counting bound") {
    for (double rb : {1e-3, 0.1, 0.4}) {
        const Geometry g{rb, 1.0, 10.0};
        const double L = 1e4;
        const auto vals = smol_eigenvalues(g, 60).values();
        const auto count = static_cast<double>(std::count_if(vals.begin(), vals.end(), [&](double v) { return v <= L; }));
        CHECK(std::abs(count - g.kappa() * g.R * std::sqrt(L) / kPi) <= 1.0);
    }
}

TEST_CASE("Doi eigenvalues against the original f = A oracle") {
    for (const auto& c : kDoiCases) {
        const Geometry g{c.r_b, 1.0, 10.0};
        const ModeSet d = doi_eigenvalues(g, c.lambda_hat, 50);
        const auto ref = oracle::doi_eigenvalues(g, c.lambda_hat, 50);
        REQUIRE(ref.size() == 50);
        REQUIRE(d.count() == 50);
        for (std::size_t i = 0; i < 50; ++i) {
            CAPTURE(c.r_b);
            CAPTURE(c.lambda_hat);
            CAPTURE(i);
            CHECK(d.modes[i].value == doctest::Approx(ref[i]).epsilon(1e-11));
            const double mu = d.modes[i].value;
            const double f = static_cast<double>(oracle::f_original(g, mu));
            const double a = static_cast<double>(oracle::a_original(g, mu, c.lambda_hat));
            CHECK(std::abs(f - a) <= 1e-9 * std::max(1.0, std::abs(f)));
        }
    }
}

TEST_CASE("Doi spectrum at zero reaction rate is the Neumann ball") {
    const Geometry g{0.1, 1.0, 10.0};
    const ModeSet d = doi_eigenvalues(g, 0.0, 12);
    const auto ref = oracle::neumann_ball(g.R, 12);
    const auto lib = neumann_ball_eigenvalues(g.R, 12);
    CHECK(d.modes[0].value == 0.0);
    for (std::size_t i = 1; i < 12; ++i) {
        CHECK(d.modes[i].value == doctest::Approx(ref[i]).epsilon(1e-12));
        CHECK(lib[i] == doctest::Approx(ref[i]).epsilon(1e-12));
        const double k = std::sqrt(d.modes[i].value);
        CHECK(std::abs(std::sin(k * g.R) - k * g.R * std::cos(k * g.R)) <= 1e-10 * k * g.R);
        // ((n-1) pi / R)^2 is only a lower bound for n >= 2
        CHECK(d.modes[i].value > std::pow(static_cast<double>(i) * kPi / g.R, 2));
    }
}

TEST_CASE("Doi interlacing chain") {
    for (const auto& c : kDoiCases) {
        const Geometry g{c.r_b, 1.0, 10.0};
        const auto mu = doi_eigenvalues(g, c.lambda_hat, 40).values();
        const auto al = smol_eigenvalues(g, 40).values();
        const auto be = smol_poles(g, 40);
        CHECK(mu[0] > 0.0);
        for (std::size_t i = 0; i < 40; ++i) {
            if (mu[i] > c.lambda_hat) continue;
            CAPTURE(i);
            const double m = 1e-12 * al[i];
            CHECK(mu[i] + m < al[i]);
            if (i > 0) CHECK(be[i - 1] + m < mu[i]);
        }
    }
}

TEST_CASE("Doi eigenvalues increase with the reaction rate") {
    const Geometry g{1e-2, 1.0, 10.0};
    const auto al = smol_eigenvalues(g, 10).values();
    std::vector<double> prev(10, 0.0);
    for (double lh : {1e2, 1e4, 1e6, 1e8}) {
        const auto mu = doi_eigenvalues(g, lh, 10).values();
        for (std::size_t i = 0; i < 10; ++i) {
            CHECK(mu[i] >= prev[i]);
            CHECK(mu[i] <= al[i]);
        }
        prev = mu;
    }
}

TEST_CASE("eigenvalue gap scales like lambda^(-1/2)") {
    const Geometry g{1e-2, 1.0, 10.0};
    const auto al = smol_eigenvalues(g, 3).values();
    for (std::size_t n = 0; n < 3; ++n) {
        std::vector<double> scaled;
        for (double lh : {1e6, 1e7, 1e8}) {
            const auto mu = doi_eigenvalues(g, lh, 3).values();
            scaled.push_back((al[n] - mu[n]) * std::sqrt(lh));
        }
        for (std::size_t j = 1; j < scaled.size(); ++j) {
            const double r = scaled[j] / scaled[j - 1];
            CHECK(r >= 0.7);
            CHECK(r <= 1.4);
        }
    }
}

TEST_CASE("Smoluchowski eigenfunctions solve the boundary value problem") {
    const Geometry g{0.05, 1.0, 10.0};
    const ModeSet s = smol_eigenvalues(g, 8);
    for (const auto& m : s.modes) {
        CAPTURE(m.n);
        auto u = [&](double r) { return phi(g, m.value, r); };
        const double mx = max_abs(u, g.r_b, g.R);
        CHECK(std::abs(u(g.r_b)) <= 1e-9);
        CHECK(u(0.5 * g.r_b) == 0.0);
        const double h = 1e-5;
        const double dR = (u(g.R) - u(g.R - h)) / h;  // one sided; error O(h u'')
        CHECK(std::abs(dR) <= 1e-6 * mx + 0.5 * h * m.value * mx * 2.0);
        // centred difference across the wall using the even extension
        const double dRc = (outer_profile(g, m.value, g.R + h) - outer_profile(g, m.value, g.R - h)) / (2 * h);
        CHECK(std::abs(dRc) <= 1e-6 * mx);
        for (int i = 1; i <= 10; ++i) {
            const double r = g.r_b + (g.R - g.r_b) * i / 11.0;
            const double res = radial_laplacian(u, r, 1e-4) + m.value * u(r);
            CHECK(std::abs(res) <= 1e-5 * m.value * mx);
        }
    }
    CHECK_THROWS_AS(phi(g, s.modes[0].value, 1.5), DomainError);
}

TEST_CASE("Doi eigenfunctions are continuous and satisfy the equation") {
    for (const auto& c : std::vector<DoiCase>{{0.1, 100.0}, {0.1, 1e4}, {0.3, 50.0}, {1e-2, 1e6}}) {
        const Geometry g{c.r_b, 1.0, 10.0};
        const ModeSet d = doi_eigenvalues(g, c.lambda_hat, 10);
        for (const auto& m : d.modes) {
            CAPTURE(c.r_b);
            CAPTURE(c.lambda_hat);
            CAPTURE(m.n);
            auto u = [&](double r) { return psi(g, c.lambda_hat, m.value, r); };
            const double mx = max_abs(u, 0.0, g.R, 4000);
            const double in = u(g.r_b * (1 - 1e-15));
            const double out = outer_profile(g, m.value, g.r_b);
            CHECK(std::abs(in - out) <= 1e-9 * mx);

            // second-order one-sided differences from each side
            const double h = 1e-5 * g.r_b;
            const double d_in = (3.0 * in - 4.0 * u(g.r_b - h) + u(g.r_b - 2 * h)) / (2 * h);
            const double d_out = (-3.0 * out + 4.0 * u(g.r_b + h) - u(g.r_b + 2 * h)) / (2 * h);
            const double d_scale = std::max({std::abs(d_in), std::abs(d_out), mx / g.r_b});
            CHECK(std::abs(d_in - d_out) <= 1e-5 * d_scale);

            const double dR = (outer_profile(g, m.value, g.R + 1e-5) - outer_profile(g, m.value, g.R - 1e-5)) / 2e-5;
            CHECK(std::abs(dR) <= 1e-6 * mx);

            // inside: u'' + 2u'/r = (lambda_hat - mu) u; outside: = -mu u
            for (double r : {0.3 * g.r_b, 0.7 * g.r_b, 0.5 * (g.r_b + g.R), 0.9 * g.R}) {
                const double hh = 1e-4 * std::min(g.r_b, g.R - r);
                const double potential = r < g.r_b ? c.lambda_hat : 0.0;
                const double res = radial_laplacian(u, r, hh) + (m.value - potential) * u(r);
                CHECK(std::abs(res) <= 1e-4 * std::max(m.value, c.lambda_hat) * mx);
            }

            // independent construction
            for (double r : {0.0, 0.2 * g.r_b, 0.9 * g.r_b, 2.0 * g.r_b, 0.6}) {
                CHECK(u(r) == doctest::Approx(static_cast<double>(oracle::doi_mode(g, c.lambda_hat, m.value, r)))
                                  .epsilon(1e-9)
                                  .scale(mx));
            }
        }
    }
}

TEST_CASE("Doi eigenfunctions above the reaction rate") {
    const Geometry g{0.1, 1.0, 10.0};
    const double lh = 100.0;
    const ModeSet d = doi_eigenvalues(g, lh, 30);
    int above = 0;
    for (const auto& m : d.modes) {
        if (m.value <= lh) continue;
        ++above;
        for (double r : {0.0, 0.05, 0.099, 0.1, 0.5}) {
            const double ref = static_cast<double>(oracle::doi_mode(g, lh, m.value, r));
            CHECK(psi(g, lh, m.value, r) == doctest::Approx(ref).epsilon(1e-9).scale(1.0 / g.r_b));
        }
    }
    CHECK(above > 20);
}

TEST_CASE("outer norm closed form against quadrature at 20 points") {
    for (double rb : {1e-3, 0.1}) {
        const Geometry g{rb, 1.0, 10.0};
        for (int i = 0; i < 20; ++i) {
            const double z = std::pow(10.0, -10.0 + 18.0 * i / 19.0);
            CAPTURE(rb);
            CAPTURE(z);
            CHECK(outer_norm_sq(g, z) == doctest::Approx(oracle::h_quadrature(g, z)).epsilon(1e-10));
            CHECK(outer_moment(g, z) == doctest::Approx(oracle::outer_moment_quadrature(g, z)).epsilon(1e-10).scale(1e-6));
        }
    }
}

TEST_CASE("outer norm limits") {
    const Geometry g{1e-3, 1.0, 10.0};
    CHECK(outer_norm_sq(g, 1e8) == doctest::Approx(g.gap() / 2.0).epsilon(0.01));
    const double lim0 = (std::pow(g.R, 3) - std::pow(g.r_b, 3)) / (3.0 * g.R * g.R);
    CHECK(outer_norm_sq(g, 1e-10) == doctest::Approx(lim0).epsilon(1e-4));
    CHECK(outer_norm_sq(g, 0.0) == doctest::Approx(lim0).epsilon(1e-14));
}

TEST_CASE("normalization constants") {
    const Geometry g{0.1, 1.0, 10.0};
    const ModeSet s = smol_eigenvalues(g, 10);
    for (const auto& m : s.modes) CHECK(m.norm_const * outer_norm_sq(g, m.value) == doctest::Approx(1.0).epsilon(1e-12));

    for (double lh : {100.0, 1e4}) {
        const ModeSet d = doi_eigenvalues(g, lh, 25);
        for (const auto& m : d.modes) {
            CAPTURE(lh);
            CAPTURE(m.n);
            const double in_q = oracle::inner_norm_quadrature(g, lh, m.value);
            const double out_q = oracle::h_quadrature(g, m.value);
            CHECK(inner_norm_sq(g, lh, m.value) == doctest::Approx(in_q).epsilon(1e-10).scale(out_q * 1e-6));
            CHECK(m.norm_const * (in_q + out_q) == doctest::Approx(1.0).epsilon(1e-10));
            const double mom_q = oracle::inner_moment_quadrature(g, lh, m.value);
            CHECK(inner_moment(g, lh, m.value) == doctest::Approx(mom_q).epsilon(1e-10).scale(1e-8));
        }
    }
}

TEST_CASE("mode moments: quadrature and identities") {
    const Geometry g{0.1, 1.0, 10.0};
    const ModeSet s = smol_eigenvalues(g, 10);
    for (const auto& m : s.modes) {
        const double I = mode_moment(s, m);
        CHECK(I == doctest::Approx(oracle::outer_moment_quadrature(g, m.value)).epsilon(1e-10));
        // flux through r_b: alpha I = r_b^2 phi'(r_b)
        const double h = 1e-6;
        const double dphi = (-3.0 * phi(g, m.value, g.r_b) + 4.0 * phi(g, m.value, g.r_b + h) -
                             phi(g, m.value, g.r_b + 2 * h)) / (2 * h);
        CHECK(m.value * I == doctest::Approx(g.r_b * g.r_b * dphi).epsilon(1e-6));
    }
    const double lh = 1e4;
    const ModeSet d = doi_eigenvalues(g, lh, 10);
    for (const auto& m : d.modes) {
        const double I = mode_moment(d, m);
        const double ref = oracle::outer_moment_quadrature(g, m.value) + oracle::inner_moment_quadrature(g, lh, m.value);
        CHECK(I == doctest::Approx(ref).epsilon(1e-10).scale(1e-8));
        // integrating the equation over the ball: mu I = lambda_hat int_0^{r_b} psi r^2 dr
        CHECK(m.value * I == doctest::Approx(lh * inner_moment(g, lh, m.value)).epsilon(1e-10));
    }
}

TEST_CASE("orthogonality by quadrature") {
    const Geometry g{0.1, 1.0, 10.0};
    const ModeSet s = smol_eigenvalues(g, 10);
    const double lh = 1e3;
    const ModeSet d = doi_eigenvalues(g, lh, 10);
    for (std::size_t i = 0; i < 10; ++i) {
        for (std::size_t j = i + 1; j < 10; ++j) {
            const double ai = s.modes[i].value, aj = s.modes[j].value;
            auto fs = [&](long double r) {
                return oracle::outer(g, ai, r) * oracle::outer(g, aj, r) * r * r;
            };
            const double ip = static_cast<double>(oracle::gauss_panels(fs, g.r_b, g.R, 200));
            CHECK(std::abs(ip) <= 1e-8 * std::sqrt(outer_norm_sq(g, ai) * outer_norm_sq(g, aj)));

            const double mi = d.modes[i].value, mj = d.modes[j].value;
            auto fi = [&](long double r) {
                return oracle::doi_mode(g, lh, mi, r) * oracle::doi_mode(g, lh, mj, r) * r * r;
            };
            const double ip_d = static_cast<double>(oracle::gauss_panels(fi, 0.0L, g.r_b, 200) +
                                                    oracle::gauss_panels(fi, g.r_b, g.R, 200));
            CHECK(std::abs(ip_d) <= 1e-8 / std::sqrt(d.modes[i].norm_const * d.modes[j].norm_const));
        }
    }
}

TEST_CASE("uniform eigenfunction bound") {
    const Geometry g{0.05, 1.0, 10.0};
    const ModeSet s = smol_eigenvalues(g, 40);
    const double bound = (1.0 / g.r_b) * (1.0 / (g.R * std::sqrt(s.modes[0].value / 2.0)) + 1.0);
    const ModeSet d = doi_eigenvalues(g, 1e5, 40);
    for (std::size_t i = 0; i < 40; ++i) {
        CHECK(max_abs([&](double r) { return phi(g, s.modes[i].value, r); }, g.r_b, g.R) <= bound);
        CHECK(max_abs([&](double r) { return outer_profile(g, d.modes[i].value, r); }, g.r_b, g.R) <= bound);
    }
}
