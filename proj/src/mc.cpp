#include "doismol/mc.hpp"

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

namespace doismol {

namespace {

// Merged moves keep the distance to r_b above kMergeSigmas standard deviations
// of the merged displacement; 14 ~ 8 sqrt(3).
constexpr double kMergeSigmas = 14.0;
// Largest merged step relative to R. Mirroring one merged step at the wall has
// the law of mirroring each substep for a flat wall; curvature adds O(s^2 / R).
constexpr double kMaxMergedStep = 0.05;

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
    [[nodiscard]] double norm() const noexcept { return std::sqrt(x * x + y * y + z * z); }
};

}  // namespace

void McConfig::validate(const Geometry& geom) const {
    geom.validate();
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("mc: dt must be positive");
    if (n_paths == 0) throw ConfigError("mc: n_paths must be >= 1");
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ConfigError("mc: t_max must be positive");
    if (model == Model::Doi && (!(lambda >= 0.0) || !std::isfinite(lambda))) {
        throw ConfigError("mc: lambda must be finite and non-negative");
    }
    const double step = std::sqrt(2.0 * geom.D * dt);
    if (step > geom.r_b / 10.0 * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "mc: step sqrt(2 D dt) = " << step << " exceeds r_b/10 = " << geom.r_b / 10.0;
        throw ConfigError(msg.str());
    }
}

std::uint64_t path_seed(std::uint64_t seed, std::uint64_t path) noexcept {
    // splitmix64 finaliser over a Weyl sequence indexed by path
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (path + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

BindingEvent simulate_path(const Geometry& geom, double r0, const McConfig& cfg, std::uint64_t path,
                           const PathObserver& observer) {
    std::mt19937_64 rng(path_seed(cfg.seed, path));
    boost::random::normal_distribution<double> normal;
    boost::random::uniform_01<double> uniform;

    const double sigma = std::sqrt(2.0 * geom.D * cfg.dt);
    const auto max_steps = static_cast<std::uint64_t>(std::floor(cfg.t_max / cfg.dt * (1.0 + 1e-12)));
    const bool doi = cfg.model == Model::Doi;
    const double p_react = doi ? -std::expm1(-cfg.lambda * cfg.dt) : 0.0;
    const double log_no_react = doi ? std::log1p(-p_react) : 0.0;

    Vec3 pos{r0, 0.0, 0.0};
    double radius = r0;
    std::uint64_t step = 0;
    while (step < max_steps) {
        std::uint64_t m = 1;
        if (cfg.merge_steps) {
            const double reach = std::min(std::abs(radius - geom.r_b) / kMergeSigmas, kMaxMergedStep * geom.R);
            const double ratio = reach / sigma;
            if (ratio > 1.0) {
                m = std::min<std::uint64_t>(static_cast<std::uint64_t>(ratio * ratio), max_steps - step);
                m = std::max<std::uint64_t>(m, 1);
            }
        }
        const bool started_inside = radius < geom.r_b;
        const double s = sigma * std::sqrt(static_cast<double>(m));
        pos.x += s * normal(rng);
        pos.y += s * normal(rng);
        pos.z += s * normal(rng);
        step += m;

        radius = pos.norm();
        if (radius > geom.R) {
            const double mirrored = 2.0 * geom.R - radius;
            const double scale = mirrored / radius;
            pos.x *= scale;
            pos.y *= scale;
            pos.z *= scale;
            radius = mirrored;
        }
        if (observer) observer(static_cast<double>(step) * cfg.dt, radius);

        if (!doi) {
            if (radius <= geom.r_b) return {static_cast<double>(step) * cfg.dt, true};
            continue;
        }
        const bool inside = radius < geom.r_b;
        const std::uint64_t checks = inside ? (started_inside ? m : 1) : (started_inside ? m - 1 : 0);
        if (checks == 0 || p_react <= 0.0) continue;
        if (checks == 1) {
            if (uniform(rng) < p_react) return {static_cast<double>(step) * cfg.dt, true};
            continue;
        }
        // First success among `checks` Bernoulli(p) trials, the last ending at `step`.
        const double u = uniform(rng);
        const double trial = std::floor(std::log1p(-u) / log_no_react) + 1.0;
        if (trial <= static_cast<double>(checks)) {
            const auto first_check = step - checks;
            return {static_cast<double>(first_check + static_cast<std::uint64_t>(trial)) * cfg.dt, true};
        }
    }
    return {cfg.t_max, false};
}

BindingSample simulate(const Geometry& geom, double r0, const McConfig& cfg) {
    cfg.validate(geom);
    if (!(r0 > geom.r_b && r0 <= geom.R)) {
        throw ConfigError("mc: r0 must lie in (r_b, R]");
    }

    BindingSample out;
    out.n_paths = cfg.n_paths;
    out.t_max = cfg.t_max;
    out.dt = cfg.dt;
    out.seed = cfg.seed;
    out.model = cfg.model;
    out.lambda = cfg.model == Model::Doi ? cfg.lambda : 0.0;
    out.events.resize(cfg.n_paths);

    unsigned workers = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, cfg.n_paths));
    auto run = [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) out.events[p] = simulate_path(geom, r0, cfg, p);
    };
    if (workers <= 1) {
        run(0, cfg.n_paths);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (cfg.n_paths + workers - 1) / workers;
        for (std::size_t begin = 0; begin < cfg.n_paths; begin += chunk) {
            pool.emplace_back(run, begin, std::min(cfg.n_paths, begin + chunk));
        }
    }

    double sum = 0.0;
    for (const auto& e : out.events) {
        sum += e.time;
        if (e.bound) out.sorted_bound.push_back(e.time);
    }
    std::sort(out.sorted_bound.begin(), out.sorted_bound.end());
    out.n_bound = out.sorted_bound.size();
    const double n = static_cast<double>(cfg.n_paths);
    out.mean_restricted = sum / n;
    double ss = 0.0;
    for (const auto& e : out.events) ss += (e.time - out.mean_restricted) * (e.time - out.mean_restricted);
    const double var = cfg.n_paths > 1 ? ss / (n - 1.0) : 0.0;
    out.ci95_halfwidth = 1.96 * std::sqrt(var / n);
    out.censored_fraction = 1.0 - static_cast<double>(out.n_bound) / n;
    return out;
}

double ecdf_at(const BindingSample& sample, double t) {
    if (sample.n_paths == 0 || t < 0.0) return 0.0;
    const auto it = std::upper_bound(sample.sorted_bound.begin(), sample.sorted_bound.end(), t);
    return static_cast<double>(it - sample.sorted_bound.begin()) / static_cast<double>(sample.n_paths);
}

double ecdf_standard_error(double p, std::size_t n) noexcept {
    if (n == 0) return 0.0;
    return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

}  // namespace doismol
