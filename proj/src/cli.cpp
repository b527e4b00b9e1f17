#include "doismol/harness.hpp"
#include "doismol/mc.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace doismol {

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CommonArgs {
    std::optional<double> rb, R, D, lambda, r0;
    std::optional<std::size_t> count;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string config;
    std::string svg;
};

struct Resolved {
    Geometry geom;
    double lambda = 1e9;
    double r0 = 1.0;
    std::size_t count = 10;
    std::uint64_t seed = 1;
};

template <typename T>
void pick(std::optional<T>& slot, const nlohmann::json& cfg, const char* key) {
    if (slot || !cfg.contains(key)) return;
    try {
        slot = cfg.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("config key '") + key + "': " + e.what());
    }
}

Resolved resolve(CommonArgs args) {
    if (!args.config.empty()) {
        std::ifstream in(args.config);
        if (!in) throw UsageError("cannot open config file " + args.config);
        nlohmann::json cfg;
        try {
            cfg = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            throw UsageError(std::string("config file: ") + e.what());
        }
        if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");
        pick(args.rb, cfg, "rb");
        pick(args.R, cfg, "R");
        pick(args.D, cfg, "D");
        pick(args.lambda, cfg, "lambda");
        pick(args.r0, cfg, "r0");
        pick(args.count, cfg, "count");
        pick(args.seed, cfg, "seed");
    }
    Resolved r;
    r.geom.r_b = args.rb.value_or(1e-3);
    r.geom.R = args.R.value_or(1.0);
    r.geom.D = args.D.value_or(10.0);
    r.lambda = args.lambda.value_or(1e9);
    r.r0 = args.r0.value_or(r.geom.R);
    r.count = args.count.value_or(10);
    r.seed = args.seed.value_or(1);
    try {
        r.geom.validate();
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    if (!(r.lambda >= 0.0) || !std::isfinite(r.lambda)) throw UsageError("lambda must be finite and >= 0");
    if (!(r.r0 > r.geom.r_b && r.r0 <= r.geom.R)) throw UsageError("r0 must lie in (r_b, R]");
    if (r.count == 0) throw UsageError("count must be >= 1");
    return r;
}

// Writes to --out when given, stdout otherwise.
class Output {
public:
    explicit Output(const std::string& path) {
        if (path.empty()) return;
        file_ = std::make_unique<std::ofstream>(path);
        if (!*file_) throw UsageError("cannot open output file " + path);
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

void maybe_svg(const std::string& path, const PlotSpec& spec, const std::vector<PlotSeries>& series) {
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) throw UsageError("cannot open svg file " + path);
    write_svg(out, spec, series);
}

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError(std::string("bad number in ") + what + ": '" + item + "'");
        }
    }
    if (out.empty()) throw UsageError(std::string(what) + " must not be empty");
    return out;
}

SolutionOptions grid_options(const GridSpec& grid) {
    SolutionOptions so;
    so.t_min = grid.t_points.front();
    return so;
}

void run_eigen(const Resolved& in, const CommonArgs& args) {
    const ModeSet smol = smol_eigenvalues(in.geom, in.count);
    const ModeSet doi = doi_eigenvalues(in.geom, in.lambda / in.geom.D, in.count);
    Output out(args.out);
    CsvWriter csv(out.stream(), {"n", "alpha", "mu", "gap"});
    PlotSeries sa{"alpha_n", {}, {}}, sm{"mu_n", {}, {}};
    for (std::size_t i = 0; i < in.count; ++i) {
        const double a = smol.modes[i].value, m = doi.modes[i].value;
        csv.cell(i + 1).cell(a).cell(m).cell(a - m);
        csv.end_row();
        for (auto* s : {&sa, &sm}) s->x.push_back(static_cast<double>(i + 1));
        sa.y.push_back(a);
        sm.y.push_back(m);
    }
    maybe_svg(args.svg, {"Eigenvalues", "n", "eigenvalue [um^-2]", false, true}, {sa, sm});
}

void run_density(const Resolved& in, const CommonArgs& args, std::size_t stride) {
    const GridSpec grid = subsample(reference_grids(in.geom), stride);
    const SolutionOptions so = grid_options(grid);
    const auto smol = SpectralSolution::smoluchowski(in.geom, in.r0, so);
    const auto doi = SpectralSolution::doi(in.geom, in.lambda, in.r0, so);
    Output out(args.out);
    CsvWriter csv(out.stream(), {"r", "t", "rho", "p", "abs_diff"});
    std::size_t truncated = 0;
    PlotSeries sup{"max_r |p - rho|", grid.t_points, std::vector<double>(grid.t_points.size(), 0.0)};
    for (double r : grid.r_points) {
        const auto ps = smol.profile(r);
        const auto pd = doi.profile(r);
        for (std::size_t j = 0; j < grid.t_points.size(); ++j) {
            const double t = grid.t_points[j];
            const SeriesValue rho = smol.density_from_profile(ps, t);
            const SeriesValue p = doi.density_from_profile(pd, t);
            truncated += rho.truncated + p.truncated;
            const double d = std::abs(p.value - rho.value);
            sup.y[j] = std::max(sup.y[j], d);
            csv.cell(r).cell(t).cell(rho.value).cell(p.value).cell(d);
            csv.end_row();
        }
    }
    if (truncated) std::cerr << "warning: " << truncated << " series evaluations hit the mode limit\n";
    maybe_svg(args.svg, {"Density difference", "t [s]", "sup_r |p - rho|", true, true}, {sup});
}

void run_cdf(const Resolved& in, const CommonArgs& args, std::size_t stride) {
    const GridSpec grid = subsample(reference_grids(in.geom), stride);
    const SolutionOptions so = grid_options(grid);
    const auto smol = SpectralSolution::smoluchowski(in.geom, in.r0, so);
    const auto doi = SpectralSolution::doi(in.geom, in.lambda, in.r0, so);
    Output out(args.out);
    CsvWriter csv(out.stream(), {"t", "cdf_smol", "cdf_doi", "abs_diff"});
    PlotSeries cs{"Smoluchowski", {}, {}}, cd{"Doi", {}, {}};
    std::size_t truncated = 0;
    for (double t : grid.t_points) {
        const SeriesValue a = smol.cdf(t);
        const SeriesValue b = doi.cdf(t);
        truncated += a.truncated + b.truncated;
        csv.cell(t).cell(a.value).cell(b.value).cell(std::abs(a.value - b.value));
        csv.end_row();
        cs.x.push_back(t);
        cs.y.push_back(a.value);
        cd.x.push_back(t);
        cd.y.push_back(b.value);
    }
    if (truncated) std::cerr << "warning: " << truncated << " series evaluations hit the mode limit\n";
    maybe_svg(args.svg, {"Binding-time CDF", "t [s]", "P[T < t]", true, false}, {cs, cd});
}

void run_mean(const Resolved& in, const CommonArgs& args) {
    if (!(in.lambda > 0.0)) throw UsageError("mean: lambda must be positive");
    Output out(args.out);
    CsvWriter csv(out.stream(), {"r_b", "lambda", "r0", "D", "R", "mean_smol", "mean_doi", "mean_diff", "rel_diff"});
    csv.cell(in.geom.r_b).cell(in.lambda).cell(in.r0).cell(in.geom.D).cell(in.geom.R);
    csv.cell(mean_binding_smol(in.geom, in.r0))
        .cell(mean_binding_doi(in.geom, in.lambda, in.r0))
        .cell(mean_diff(in.geom, in.lambda, in.r0))
        .cell(rel_diff(in.geom, in.lambda, in.r0));
    csv.end_row();
}

void run_sweep(const Resolved& in, const CommonArgs& args, const std::string& lambdas_text,
               const std::string& rbs_text, SweepOptions opts) {
    const auto lambdas = parse_list(lambdas_text, "--lambdas");
    const auto rbs = parse_list(rbs_text, "--rbs");
    for (double rb : rbs) {
        if (!(rb > 0.0 && rb < in.geom.R)) throw UsageError("--rbs entries must lie in (0, R)");
        if (!(in.r0 > rb)) throw UsageError("r0 must exceed every r_b in --rbs");
    }
    const auto rows = sweep(lambdas, rbs, in.geom, in.r0, opts);
    Output out(args.out);
    write_study_csv(out.stream(), rows);
    bool failed = false;
    for (const auto& r : rows) {
        if (!r.error.empty()) {
            std::cerr << "cell (lambda=" << r.lambda << ", r_b=" << r.r_b << ") failed: " << r.error << '\n';
            failed = true;
        }
    }
    if (!args.svg.empty()) {
        std::vector<PlotSeries> series;
        for (double rb : rbs) {
            PlotSeries s{"r_b = " + format_number(rb), {}, {}};
            for (const auto& r : rows) {
                if (r.r_b != rb || !r.error.empty()) continue;
                s.x.push_back(r.lambda);
                s.y.push_back(opts.densities ? r.norm_density_scaled : r.norm_cdf);
            }
            series.push_back(std::move(s));
        }
        maybe_svg(args.svg, {"Model difference", "lambda [1/s]", "sup norm", true, true}, series);
    }
    if (failed) throw std::runtime_error("some sweep cells failed");
}

void run_mc(const Resolved& in, const CommonArgs& args, McConfig cfg, const std::string& model,
            std::size_t ecdf_points) {
    if (model == "smol" || model == "smoluchowski") {
        cfg.model = Model::Smoluchowski;
    } else if (model == "doi") {
        cfg.model = Model::Doi;
    } else {
        throw UsageError("--model must be smol or doi");
    }
    cfg.lambda = in.lambda;
    cfg.seed = in.seed;
    try {
        cfg.validate(in.geom);
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
    const BindingSample s = simulate(in.geom, in.r0, cfg);
    const double analytic = cfg.model == Model::Doi ? mean_binding_doi(in.geom, in.lambda, in.r0)
                                                    : mean_binding_smol(in.geom, in.r0);
    Output out(args.out);
    if (ecdf_points == 0) {
        CsvWriter csv(out.stream(), {"model", "n_paths", "n_bound", "mean_restricted", "ci95_halfwidth",
                                     "censored_fraction", "mean_analytic"});
        csv.cell(to_string(cfg.model)).cell(s.n_paths).cell(s.n_bound);
        csv.cell(s.mean_restricted).cell(s.ci95_halfwidth).cell(s.censored_fraction).cell(analytic);
        csv.end_row();
        return;
    }
    SolutionOptions so;
    so.t_min = std::max(cfg.t_max / static_cast<double>(ecdf_points) / 10.0, 1e-5);
    const auto sol = cfg.model == Model::Doi ? SpectralSolution::doi(in.geom, in.lambda, in.r0, so)
                                             : SpectralSolution::smoluchowski(in.geom, in.r0, so);
    CsvWriter csv(out.stream(), {"t", "ecdf", "cdf", "standard_error"});
    PlotSeries se{"ECDF", {}, {}}, sa{"analytic", {}, {}};
    for (std::size_t i = 1; i <= ecdf_points; ++i) {
        const double t = cfg.t_max * static_cast<double>(i) / static_cast<double>(ecdf_points);
        const double e = ecdf_at(s, t);
        const double c = sol.cdf(t).value;
        csv.cell(t).cell(e).cell(c).cell(ecdf_standard_error(c, s.n_paths));
        csv.end_row();
        se.x.push_back(t);
        se.y.push_back(e);
        sa.x.push_back(t);
        sa.y.push_back(c);
    }
    maybe_svg(args.svg, {"Binding-time ECDF", "t [s]", "P[T < t]", false, false}, {se, sa});
}

std::vector<std::pair<double, double>> read_columns(const std::string& path, const std::string& xcol,
                                                    const std::string& ycol) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw UsageError(path + " is empty");
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string h;
        while (std::getline(ss, h, ',')) header.push_back(h);
    }
    auto index_of = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        throw UsageError("column '" + name + "' not in " + path);
    };
    const std::size_t ix = index_of(xcol), iy = index_of(ycol);
    std::vector<std::pair<double, double>> pts;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cells.push_back(c);
        if (cells.size() <= std::max(ix, iy)) continue;
        try {
            pts.emplace_back(std::stod(cells[ix]), std::stod(cells[iy]));
        } catch (const std::exception&) {
            throw UsageError("non-numeric value in " + path);
        }
    }
    return pts;
}

void run_slope(const CommonArgs& args, const std::string& in_path, const std::string& xcol,
               const std::string& ycol, const std::string& points) {
    std::vector<std::pair<double, double>> pts;
    if (!points.empty()) {
        std::stringstream ss(points);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto colon = item.find(':');
            if (colon == std::string::npos) throw UsageError("--points entries must be x:y");
            try {
                pts.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
            } catch (const std::exception&) {
                throw UsageError("bad --points entry '" + item + "'");
            }
        }
    } else if (!in_path.empty()) {
        pts = read_columns(in_path, xcol, ycol);
    } else {
        throw UsageError("slope needs --in or --points");
    }
    SlopeFit fit;
    try {
        fit = loglog_slope(pts);
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    Output out(args.out);
    CsvWriter csv(out.stream(), {"slope", "intercept", "residual_rms", "n_points"});
    csv.cell(fit.slope).cell(fit.intercept).cell(fit.residual_rms).cell(fit.n_points);
    csv.end_row();
    PlotSeries data{"data", {}, {}}, line{"fit", {}, {}};
    for (const auto& [x, y] : pts) {
        data.x.push_back(x);
        data.y.push_back(y);
        line.x.push_back(x);
        line.y.push_back(std::exp(fit.intercept) * std::pow(x, fit.slope));
    }
    maybe_svg(args.svg, {"Log-log fit", xcol, ycol, true, true}, {data, line});
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Doi and Smoluchowski binding models in a reflecting ball", "doismol"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonArgs args;
    app.add_option("--rb", args.rb, "reaction radius r_b [um] (default 1e-3)");
    app.add_option("--R", args.R, "domain radius R [um] (default 1)");
    app.add_option("--D", args.D, "diffusivity [um^2/s] (default 10)");
    app.add_option("--lambda", args.lambda, "Doi reaction rate [1/s] (default 1e9)");
    app.add_option("--r0", args.r0, "source radius [um] (default R)");
    app.add_option("--count", args.count, "number of eigenvalues (default 10)");
    app.add_option("--seed", args.seed, "Monte Carlo seed (default 1)");
    app.add_option("--out", args.out, "output CSV file (default stdout)");
    app.add_option("--config", args.config, "JSON file with rb, R, D, lambda, r0, count, seed");
    app.add_option("--svg", args.svg, "also write a line plot to this SVG file");

    auto* eigen = app.add_subcommand("eigen", "first eigenvalues of both models");
    auto* density = app.add_subcommand("density", "densities on the reference grid");
    auto* cdf_cmd = app.add_subcommand("cdf", "binding-time CDFs on the reference t-grid");
    auto* mean = app.add_subcommand("mean", "closed-form mean binding times");
    auto* sweep_cmd = app.add_subcommand("sweep", "norms and mean times over (lambda, r_b)");
    auto* mc = app.add_subcommand("mc", "Brownian-dynamics binding times");
    auto* slope = app.add_subcommand("slope", "log-log least-squares slope");

    std::size_t stride = 10;
    density->add_option("--stride", stride, "grid subsampling stride")->capture_default_str();
    cdf_cmd->add_option("--stride", stride, "grid subsampling stride")->capture_default_str();

    std::string lambdas = "1e5,1e6,1e7,1e8,1e9", rbs = "1e-2,1e-3";
    SweepOptions sweep_opts;
    sweep_opts.stride = 10;
    std::string what = "both";
    sweep_cmd->add_option("--lambdas", lambdas, "comma separated rates")->capture_default_str();
    sweep_cmd->add_option("--rbs", rbs, "comma separated reaction radii")->capture_default_str();
    sweep_cmd->add_option("--stride", sweep_opts.stride, "grid subsampling stride")->capture_default_str();
    sweep_cmd->add_option("--threads", sweep_opts.threads, "worker threads (0 = all cores)")
        ->capture_default_str();
    sweep_cmd->add_option("--norms", what, "density, cdf, both or none")
        ->check(CLI::IsMember({"density", "cdf", "both", "none"}))
        ->capture_default_str();

    McConfig mc_cfg;
    std::string model = "smol";
    std::size_t ecdf_points = 0;
    mc->add_option("--model", model, "smol or doi")->capture_default_str();
    mc->add_option("--dt", mc_cfg.dt, "time step [s]")->capture_default_str();
    mc->add_option("--paths", mc_cfg.n_paths, "number of paths")->capture_default_str();
    mc->add_option("--t-max", mc_cfg.t_max, "censoring time [s]")->capture_default_str();
    mc->add_option("--threads", mc_cfg.threads, "worker threads (0 = all cores)")->capture_default_str();
    mc->add_option("--ecdf", ecdf_points, "write ECDF at this many times instead of the summary");

    std::string in_path, xcol = "lambda", ycol = "norm_density_scaled", points;
    slope->add_option("--in", in_path, "CSV file to read");
    slope->add_option("--x", xcol, "x column")->capture_default_str();
    slope->add_option("--y", ycol, "y column")->capture_default_str();
    slope->add_option("--points", points, "inline data as x:y,x:y,...");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (slope->parsed()) {
            run_slope(args, in_path, xcol, ycol, points);
            return 0;
        }
        const Resolved in = resolve(args);
        if (eigen->parsed()) run_eigen(in, args);
        if (density->parsed()) run_density(in, args, stride);
        if (cdf_cmd->parsed()) run_cdf(in, args, stride);
        if (mean->parsed()) run_mean(in, args);
        if (sweep_cmd->parsed()) {
            sweep_opts.densities = what == "density" || what == "both";
            sweep_opts.cdfs = what == "cdf" || what == "both";
            run_sweep(in, args, lambdas, rbs, sweep_opts);
        }
        if (mc->parsed()) run_mc(in, args, mc_cfg, model, ecdf_points);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace doismol
