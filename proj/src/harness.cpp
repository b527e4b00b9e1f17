#include "doismol/harness.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace doismol {

GridSpec reference_grids(const Geometry& geom) {
    geom.validate();
    GridSpec g;
    const double rb = geom.r_b, R = geom.R;
    for (double f : {5e-6, 1e-5, 5e-5, 1e-4, 5e-4, 1e-3, 5e-3}) g.r_points.push_back(rb + rb * f);
    for (int k = 0; k < 100; ++k) {
        const double frac = 0.01 + k * 0.01;
        g.r_points.push_back(std::min(R, frac * (R - rb) + rb));
    }

    g.t_points = {1e-5, 1e-4, 1e-3};
    for (int k = 0; k < 10000; ++k) g.t_points.push_back(0.01 + k * 0.01);
    for (int k = 0; k < 100; ++k) g.t_points.push_back(101.0 + k);
    for (int k = 0; k <= 80; ++k) g.t_points.push_back(200.0 + 10.0 * k);
    for (int k = 0; k <= 44; ++k) g.t_points.push_back(1200.0 + 200.0 * k);
    return g;
}

GridSpec subsample(const GridSpec& grid, std::size_t stride) {
    if (stride <= 1) return grid;
    auto pick = [stride](const std::vector<double>& v, std::size_t keep_head) {
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i < keep_head || (i - keep_head) % stride == 0) out.push_back(v[i]);
        }
        if (!v.empty() && out.back() != v.back()) out.push_back(v.back());
        return out;
    };
    return GridSpec{pick(grid.r_points, 7), pick(grid.t_points, 3)};
}

namespace {

void require_same_geometry(const SpectralSolution& a, const SpectralSolution& b) {
    const Geometry& ga = a.geometry();
    const Geometry& gb = b.geometry();
    if (ga.r_b != gb.r_b || ga.R != gb.R || ga.D != gb.D) {
        throw DomainError("sup norm: solutions have different geometries");
    }
}

double min_time(const GridSpec& grid) {
    if (grid.t_points.empty()) throw DomainError("grid has no time points");
    return *std::min_element(grid.t_points.begin(), grid.t_points.end());
}

void note_truncation(NormResult& res, const SeriesValue& v) {
    if (!v.truncated) return;
    ++res.truncated_cells;
    res.worst_truncated_term = std::max(res.worst_truncated_term, v.last_term);
}

}  // namespace

NormResult sup_norm_density(const SpectralSolution& a, const SpectralSolution& b, const GridSpec& grid) {
    require_same_geometry(a, b);
    NormResult res;
    res.value = -1.0;
    for (double r : grid.r_points) {
        if (r < a.geometry().r_b) continue;
        const auto pa = a.profile(r);
        const auto pb = b.profile(r);
        for (double t : grid.t_points) {
            const SeriesValue va = a.density_from_profile(pa, t);
            const SeriesValue vb = b.density_from_profile(pb, t);
            note_truncation(res, va);
            note_truncation(res, vb);
            const double d = std::abs(va.value - vb.value);
            if (d > res.value) {
                res.value = d;
                res.r_at = r;
                res.t_at = t;
            }
        }
    }
    res.value = std::max(res.value, 0.0);
    return res;
}

NormResult sup_norm_cdf(const SpectralSolution& a, const SpectralSolution& b, const GridSpec& grid) {
    require_same_geometry(a, b);
    NormResult res;
    res.value = -1.0;
    for (double t : grid.t_points) {
        const SeriesValue va = a.cdf(t);
        const SeriesValue vb = b.cdf(t);
        note_truncation(res, va);
        note_truncation(res, vb);
        const double d = std::abs(va.value - vb.value);
        if (d > res.value) {
            res.value = d;
            res.t_at = t;
        }
    }
    res.value = std::max(res.value, 0.0);
    return res;
}

NormResult sup_norm_density_diff(const Geometry& geom, double lambda, double r0, const NormOptions& opts) {
    const GridSpec grid = subsample(reference_grids(geom), opts.stride);
    SolutionOptions so;
    so.truncation = opts.truncation;
    so.scale_4pi = opts.scale_4pi;
    so.t_min = min_time(grid);
    const auto smol = SpectralSolution::smoluchowski(geom, r0, so);
    const auto doi = SpectralSolution::doi(geom, lambda, r0, so);
    return sup_norm_density(doi, smol, grid);
}

NormResult sup_norm_cdf_diff(const Geometry& geom, double lambda, double r0, const NormOptions& opts) {
    const GridSpec grid = subsample(reference_grids(geom), opts.stride);
    SolutionOptions so;
    so.truncation = opts.truncation;
    so.t_min = min_time(grid);
    const auto smol = SpectralSolution::smoluchowski(geom, r0, so);
    const auto doi = SpectralSolution::doi(geom, lambda, r0, so);
    return sup_norm_cdf(doi, smol, grid);
}

namespace {

StudyRow study_cell(double lambda, double rb, const Geometry& geom_template, double r0,
                    const SweepOptions& opts) {
    StudyRow row;
    row.lambda = lambda;
    row.r_b = rb;
    try {
        Geometry geom = geom_template;
        geom.r_b = rb;
        geom.validate();
        row.mean_smol = mean_binding_smol(geom, r0);
        row.mean_doi = mean_binding_doi(geom, lambda, r0);
        row.mean_diff = mean_diff(geom, lambda, r0);
        row.rel_diff = rel_diff(geom, lambda, r0);
        if (opts.densities || opts.cdfs) {
            const GridSpec grid = subsample(reference_grids(geom), opts.stride);
            SolutionOptions so;
            so.truncation = opts.truncation;
            so.t_min = min_time(grid);
            const auto smol = SpectralSolution::smoluchowski(geom, r0, so);
            const auto doi = SpectralSolution::doi(geom, lambda, r0, so);
            if (opts.densities) {
                const NormResult n = sup_norm_density(doi, smol, grid);
                row.norm_density_scaled = n.value;
                row.norm_density_raw = n.value * 4.0 * std::numbers::pi;
                row.truncated_cells += n.truncated_cells;
            }
            if (opts.cdfs) {
                const NormResult n = sup_norm_cdf(doi, smol, grid);
                row.norm_cdf = n.value;
                row.truncated_cells += n.truncated_cells;
            }
        }
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    return row;
}

}  // namespace

std::vector<StudyRow> sweep(const std::vector<double>& lambdas, const std::vector<double>& rbs,
                            const Geometry& geom_template, double r0, const SweepOptions& opts) {
    if (lambdas.empty() || rbs.empty()) throw DomainError("sweep: lambda and r_b lists must be nonempty");
    std::vector<StudyRow> rows(lambdas.size() * rbs.size());
    auto run_cell = [&](std::size_t idx) {
        rows[idx] = study_cell(lambdas[idx / rbs.size()], rbs[idx % rbs.size()], geom_template, r0, opts);
    };
    const unsigned workers =
        opts.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opts.threads;
    if (workers <= 1 || rows.size() == 1) {
        for (std::size_t i = 0; i < rows.size(); ++i) run_cell(i);
        return rows;
    }
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < rows.size(); i += workers) run_cell(i);
        });
    }
    return rows;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_number(v)); }

CsvWriter& CsvWriter::cell(std::size_t v) { return cell(std::to_string(v)); }

CsvWriter& CsvWriter::cell(const std::string& v) {
    if (in_row_ >= columns_) throw std::logic_error("CsvWriter: too many cells in row");
    if (in_row_) out_ << ',';
    if (v.find_first_of(",\"\n") != std::string::npos) {
        out_ << '"';
        for (char ch : v) out_ << (ch == '"' ? std::string("\"\"") : std::string(1, ch));
        out_ << '"';
    } else {
        out_ << v;
    }
    ++in_row_;
    return *this;
}

void CsvWriter::end_row() {
    if (in_row_ != columns_) throw std::logic_error("CsvWriter: row has wrong number of cells");
    out_ << '\n';
    in_row_ = 0;
}

void write_study_csv(std::ostream& out, const std::vector<StudyRow>& rows) {
    CsvWriter csv(out, {"lambda", "r_b", "norm_density_scaled", "norm_density_raw", "norm_cdf", "mean_doi",
                        "mean_smol", "mean_diff", "rel_diff", "truncated_cells", "error"});
    for (const auto& r : rows) {
        csv.cell(r.lambda)
            .cell(r.r_b)
            .cell(r.norm_density_scaled)
            .cell(r.norm_density_raw)
            .cell(r.norm_cdf)
            .cell(r.mean_doi)
            .cell(r.mean_smol)
            .cell(r.mean_diff)
            .cell(r.rel_diff)
            .cell(r.truncated_cells)
            .cell(r.error);
        csv.end_row();
    }
}

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

void write_svg(std::ostream& out, const PlotSpec& spec, const std::vector<PlotSeries>& series) {
    constexpr double width = 720, height = 480, left = 80, right = 170, top = 40, bottom = 60;
    const double plot_w = width - left - right, plot_h = height - top - bottom;
    auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return spec.log_y ? std::log10(v) : v; };
    auto usable = [&](double x, double y) {
        return std::isfinite(x) && std::isfinite(y) && (!spec.log_x || x > 0) && (!spec.log_y || y > 0);
    };

    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            x0 = std::min(x0, tx(s.x[i]));
            x1 = std::max(x1, tx(s.x[i]));
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    }
    if (!(x0 < INFINITY)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    auto px = [&](double v) { return left + (tx(v) - x0) / (x1 - x0) * plot_w; };
    auto py = [&](double v) { return top + plot_h - (ty(v) - y0) / (y1 - y0) * plot_h; };

    static constexpr std::array<const char*, 6> colors{"#1f77b4", "#d62728", "#2ca02c",
                                                       "#ff7f0e", "#9467bd", "#8c564b"};
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
        << xml_escape(spec.title) << "</text>\n";
    out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << plot_h
        << "\" fill=\"none\" stroke=\"black\"/>\n";

    auto tick_label = [](double v, bool log) {
        std::ostringstream s;
        if (log) {
            s << "1e" << static_cast<int>(std::round(v));
        } else {
            s.precision(3);
            s << v;
        }
        return s.str();
    };
    for (int i = 0; i <= 5; ++i) {
        const double fx = x0 + (x1 - x0) * i / 5.0, fy = y0 + (y1 - y0) * i / 5.0;
        const double sx = left + plot_w * i / 5.0, sy = top + plot_h - plot_h * i / 5.0;
        out << "<text x=\"" << sx << "\" y=\"" << top + plot_h + 18 << "\" text-anchor=\"middle\">"
            << tick_label(fx, spec.log_x) << "</text>\n";
        out << "<text x=\"" << left - 6 << "\" y=\"" << sy + 4 << "\" text-anchor=\"end\">"
            << tick_label(fy, spec.log_y) << "</text>\n";
    }
    out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">"
        << xml_escape(spec.x_label) << "</text>\n";
    out << "<text transform=\"translate(18," << top + plot_h / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
        << xml_escape(spec.y_label) << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = colors[k % colors.size()];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        }
        out << "\"/>\n";
        const double ly = top + 16 + 18 * static_cast<double>(k);
        out << "<line x1=\"" << left + plot_w + 10 << "\" y1=\"" << ly << "\" x2=\"" << left + plot_w + 30
            << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << left + plot_w + 35 << "\" y=\"" << ly + 4 << "\">" << xml_escape(s.label)
            << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace doismol
