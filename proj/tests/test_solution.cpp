#include <doctest.h>

#include "doismol/harness.hpp"
#include "doismol/solution.hpp"
#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace doismol;

namespace {

const Geometry kWide{0.1, 1.0, 10.0};
const Geometry kNarrow{1e-3, 1.0, 10.0};

}  // namespace

TEST_CASE("absorbing boundary and Green symmetry") {
    const auto s = SpectralSolution::smoluchowski(kWide, 1.0);
    CHECK(std::abs(s.density(kWide.r_b, 0.01).value) <= 1e-8);

    SolutionOptions o;
    o.t_min = 0.1;
    for (bool doi : {false, true}) {
        auto make = [&](double r0) {
            return doi ? SpectralSolution::doi(kWide, 1e3, r0, o) : SpectralSolution::smoluchowski(kWide, r0, o);
        };
        const double a = make(0.5).density(0.8, 0.1).value;
        const double b = make(0.8).density(0.5, 0.1).value;
        CHECK(a == doctest::Approx(b).epsilon(1e-9));
    }
}

TEST_CASE("long-time density is the first mode") {
    const auto s = SpectralSolution::smoluchowski(kWide, 1.0);
    const EigenMode& m1 = s.modes().modes[0];
    const double t = 5.0 / (kWide.D * m1.value);
    for (double r : {0.2, 0.5, 0.9, 1.0}) {
        const double lead = m1.norm_const * phi(kWide, m1.value, 1.0) * phi(kWide, m1.value, r) *
                            std::exp(-kWide.D * m1.value * t) / (4.0 * std::numbers::pi);
        const double ratio = s.density(r, t).value / lead;
        CHECK(ratio >= 1.0 - 1e-4);
        CHECK(ratio <= 1.0 + 1e-4);
    }
}

TEST_CASE("Doi density is positive inside the reaction sphere") {
    const auto d = SpectralSolution::doi(kWide, 1e4 * kWide.D, 1.0);
    for (double r : {0.0, 0.03, 0.07, 0.0999}) CHECK(d.density(r, 0.01).value > 0.0);
    const auto s = SpectralSolution::smoluchowski(kWide, 1.0);
    CHECK(s.density(0.05, 0.01).value == 0.0);
}

TEST_CASE("density integrates to the survival probability") {
    for (bool doi : {false, true}) {
        const auto sol = doi ? SpectralSolution::doi(kWide, 1e3, 1.0) : SpectralSolution::smoluchowski(kWide, 1.0);
        for (double t : {0.01, 0.05, 0.3}) {
            auto f = [&](double r) { return sol.density(r, t).value * r * r; };
            const double lo = doi ? 0.0 : kWide.r_b;
            double mass = 0.0;
            if (doi) mass += integrate(f, lo, kWide.r_b, 1e-9);
            mass += integrate(f, kWide.r_b, kWide.R, 1e-9);
            mass *= 4.0 * std::numbers::pi;
            CHECK(mass == doctest::Approx(sol.survival(t).value).epsilon(1e-7));
        }
    }
}

TEST_CASE("raw densities are 4 pi times the scaled ones") {
    SolutionOptions raw;
    raw.scale_4pi = false;
    const auto a = SpectralSolution::doi(kWide, 1e3, 1.0);
    const auto b = SpectralSolution::doi(kWide, 1e3, 1.0, raw);
    CHECK(b.density(0.4, 0.02).value == doctest::Approx(4.0 * std::numbers::pi * a.density(0.4, 0.02).value));
    CHECK(b.cdf(0.02).value == doctest::Approx(a.cdf(0.02).value).epsilon(1e-15));
}

TEST_CASE("CDF behaviour on the reference grid") {
    const auto grid = reference_grids(kNarrow);
    const auto s = SpectralSolution::smoluchowski(kNarrow, 1.0);
    const auto d = SpectralSolution::doi(kNarrow, 1e9, 1.0);
    double prev_s = -1.0, prev_d = -1.0;
    for (double t : grid.t_points) {
        const double cs = s.cdf(t).value, cd = d.cdf(t).value;
        CHECK(cs >= prev_s - 1e-9);
        CHECK(cd >= prev_d - 1e-9);
        CHECK(cd <= cs + 1e-6);
        CHECK(cs >= -1e-9);
        CHECK(cs <= 1.0 + 1e-9);
        prev_s = cs;
        prev_d = cd;
    }
    CHECK(prev_s > 0.999);
}

TEST_CASE("CDF reaches one") {
    const auto s = SpectralSolution::smoluchowski(kWide, 1.0);
    CHECK(s.cdf(10.0 * mean_binding_smol(kWide, 1.0)).value >= 0.999);
    CHECK(s.cdf(1e-5).value < 1e-6);
}

TEST_CASE("truncation and time limits") {
    SolutionOptions o;
    o.truncation.max_modes = 3;
    const auto s = SpectralSolution::smoluchowski(kWide, 1.0, o);
    const SeriesValue v = s.density(0.5, 1e-4);
    CHECK(v.truncated);
    CHECK(v.terms == 3);
    CHECK(v.last_term > 0.0);

    const auto full = SpectralSolution::smoluchowski(kWide, 1.0);
    const SeriesValue w = full.density(0.5, 1e-4);
    CHECK_FALSE(w.truncated);
    CHECK(w.terms < full.modes().count());
    CHECK(full.density(0.5, 1e-6).slow_convergence);
    CHECK_THROWS_AS(static_cast<void>(full.density(0.5, 1e-9)), DomainError);
    CHECK_THROWS_AS(static_cast<void>(full.cdf(0.0)), DomainError);
    CHECK_THROWS_AS(SpectralSolution::smoluchowski(kWide, 0.05), DomainError);

    const auto profile = full.profile(0.7);
    CHECK(full.density_from_profile(profile, 0.02).value == full.density(0.7, 0.02).value);
}

TEST_CASE("general initial data") {
    // uniform density on the shell: (g, phi_n) = I_n / shell volume
    const double vol = (std::pow(kWide.R, 3) - std::pow(kWide.r_b, 3)) / 3.0;
    const ModeSet modes = smol_eigenvalues(kWide, 400);
    const auto sol = SpectralSolution::with_initial_data(
        modes, [vol](const ModeSet& set, const EigenMode& m) { return mode_moment(set, m) / vol; });
    CHECK(sol.survival(1e-4).value == doctest::Approx(1.0).epsilon(2e-3));
    CHECK(sol.survival(0.01).value < 1.0);
    ModeSet bare = modes;
    bare.modes[0].norm_const = 0.0;
    CHECK_THROWS_AS(SpectralSolution::with_initial_data(bare, [](const ModeSet&, const EigenMode&) { return 1.0; }),
                    DomainError);
}

TEST_CASE("mean binding times") {
    CHECK(mean_binding_smol(kWide, kWide.r_b) == 0.0);
    CHECK(mean_binding_smol(kWide, 1.0) == doctest::Approx(0.2835).epsilon(1e-12));
    CHECK(mean_binding_smol(kNarrow, 1.0) == doctest::Approx(33.28333335).epsilon(1e-12));
    CHECK_THROWS_AS(mean_binding_smol(kWide, 0.05), DomainError);
    CHECK_THROWS_AS(mean_binding_doi(kWide, 1e3, 1.5), DomainError);

    const double m = mean_binding_doi(kWide, 1e3, 1.0);
    CHECK(m == doctest::Approx(oracle::mean_doi_plain(kWide, 1e3, 1.0)).epsilon(1e-13));
    CHECK(m == doctest::Approx(1.348).epsilon(1e-3));

    const double in = mean_binding_doi(kWide, 1e3, kWide.r_b * (1 - 1e-15));
    const double out = mean_binding_doi(kWide, 1e3, kWide.r_b);
    CHECK(in == doctest::Approx(out).epsilon(1e-12));
    CHECK(mean_binding_doi(kWide, 1e3, 0.0) == doctest::Approx(oracle::mean_doi_plain(kWide, 1e3, 1e-12)).epsilon(1e-9));
    for (double r0 : {0.02, 0.05, 0.3, 0.7}) {
        CHECK(mean_binding_doi(kWide, 1e3, r0) == doctest::Approx(oracle::mean_doi_plain(kWide, 1e3, r0)).epsilon(1e-12));
    }
    // large sqrt(lambda_hat) r_b stays finite
    CHECK(std::isfinite(mean_binding_doi(kWide, 1e12, 0.05)));
    CHECK(std::isfinite(mean_binding_doi(kNarrow, 1e16, 1.0)));

    CHECK(mean_diff(kWide, 1e3, 1.0) == doctest::Approx(m - mean_binding_smol(kWide, 1.0)).epsilon(1e-12));
    CHECK(mean_diff(kWide, 1e3, 0.5) == doctest::Approx(mean_diff(kWide, 1e3, 1.0)).epsilon(1e-14));
}

TEST_CASE("mean binding time equals the integrated survival") {
    SolutionOptions o;
    o.t_min = 1e-4;
    const auto d = SpectralSolution::doi(kWide, 1e3, 1.0, o);
    auto s = [&](double t) { return d.survival(t).value; };
    double total = 1e-4;  // survival is 1 to ~1e-12 before t_min
    for (double a = 1e-4, b = 0.1; a < 200.0; a = b, b *= 4.0) total += integrate(s, a, b, 1e-9);
    CHECK(total == doctest::Approx(mean_binding_doi(kWide, 1e3, 1.0)).epsilon(5e-3));

    const auto sm = SpectralSolution::smoluchowski(kWide, 1.0, o);
    auto ss = [&](double t) { return sm.survival(t).value; };
    double total_s = 1e-4;
    for (double a = 1e-4, b = 0.1; a < 50.0; a = b, b *= 4.0) total_s += integrate(ss, a, b, 1e-9);
    CHECK(total_s == doctest::Approx(mean_binding_smol(kWide, 1.0)).epsilon(5e-3));
}

TEST_CASE("mean difference: scaling behaviour") {
    for (double rb : {1e-3, 1e-2, 0.1}) {
        const Geometry g{rb, 1.0, 10.0};
        for (double lam : {1e3, 1e6, 1e9, 1e12}) CHECK(mean_diff(g, lam, 1.0) > 0.0);
    }

    std::vector<double> scaled;
    for (double lam : {1e9, 1e10, 1e11}) scaled.push_back(mean_diff(kNarrow, lam, 1.0) * std::sqrt(lam));
    for (std::size_t i = 1; i < scaled.size(); ++i) {
        CHECK(scaled[i] / scaled[i - 1] >= 0.7);
        CHECK(scaled[i] / scaled[i - 1] <= 1.4);
    }

    // independent evaluation of the relative difference at (r_b, lambda) = (1e-3, 1e11)
    const double ref_doi = oracle::mean_doi_plain(kNarrow, 1e11, 1.0);
    const double ref_smol = 33.28333335;
    const double rel = rel_diff(kNarrow, 1e11, 1.0);
    CHECK(rel == doctest::Approx((ref_doi - ref_smol) / ref_smol).epsilon(1e-9));
    // the relative difference sits just above one percent here
    CHECK(rel == doctest::Approx(0.0101162).epsilon(1e-5));

    // at fixed lambda the difference grows like r_b^-2, not r_b^-1
    const Geometry g2{1e-2, 1.0, 10.0};
    const double ratio = mean_diff(kNarrow, 1e9, 1.0) / mean_diff(g2, 1e9, 1.0);
    const double ref_ratio = (oracle::mean_doi_plain(kNarrow, 1e9, 1.0) - mean_binding_smol(kNarrow, 1.0)) /
                             (oracle::mean_doi_plain(g2, 1e9, 1.0) - mean_binding_smol(g2, 1.0));
    CHECK(ratio == doctest::Approx(ref_ratio).epsilon(1e-9));
    CHECK(ratio == doctest::Approx(110.0).epsilon(0.01));
    const double rel_ratio = rel_diff(kNarrow, 1e9, 1.0) / rel_diff(g2, 1e9, 1.0);
    CHECK(rel_ratio >= 5.0);
    CHECK(rel_ratio <= 20.0);
}
