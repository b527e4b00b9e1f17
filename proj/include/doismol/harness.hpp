#ifndef DOISMOL_HARNESS_HPP
#define DOISMOL_HARNESS_HPP

/**
 * @file harness.hpp
 * @brief Evaluation grids, sup-norm model differences, parameter sweeps and
 *        the CSV/SVG writers behind the command-line tool.
 */

#include "doismol/numerics.hpp"
#include "doismol/solution.hpp"
#include "doismol/spectral.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace doismol {

// ----------------------------------------------------------------------------
// Grids
// ----------------------------------------------------------------------------

struct GridSpec {
    std::vector<double> r_points;  ///< 7 near-boundary points then 100 uniform points
    std::vector<double> t_points;  ///< 10229 times, 200 s listed twice
};

/**
 * Reference evaluation grid. Progressions are built as start + k * step from
 * integer k so the values are bit-stable across platforms.
 */
GridSpec reference_grids(const Geometry& geom);

/**
 * Every `stride`-th point of each axis. The 7 near-boundary radii and the
 * three sub-0.01 s times are always kept.
 */
GridSpec subsample(const GridSpec& grid, std::size_t stride);

// ----------------------------------------------------------------------------
// Sup norms
// ----------------------------------------------------------------------------

struct NormResult {
    double value = 0.0;
    double r_at = 0.0;            ///< worst cell (density norms only)
    double t_at = 0.0;
    std::size_t truncated_cells = 0;
    double worst_truncated_term = 0.0;
};

/// max_{i,j} |a(r_i, t_j) - b(r_i, t_j)|; both solutions share the geometry.
NormResult sup_norm_density(const SpectralSolution& a, const SpectralSolution& b, const GridSpec& grid);

/// max_j |cdf_a(t_j) - cdf_b(t_j)|.
NormResult sup_norm_cdf(const SpectralSolution& a, const SpectralSolution& b, const GridSpec& grid);

struct NormOptions {
    std::size_t stride = 1;  ///< grid subsampling
    bool scale_4pi = true;
    Truncation truncation;
};

/// Doi vs Smoluchowski density difference on the reference grid (lambda in s^-1).
NormResult sup_norm_density_diff(const Geometry& geom, double lambda, double r0, const NormOptions& opts = {});

/// Doi vs Smoluchowski binding-time CDF difference on the reference t-grid.
NormResult sup_norm_cdf_diff(const Geometry& geom, double lambda, double r0, const NormOptions& opts = {});

// ----------------------------------------------------------------------------
// Sweeps
// ----------------------------------------------------------------------------

struct StudyRow {
    double lambda = 0.0;
    double r_b = 0.0;
    double norm_density_scaled = 0.0;
    double norm_density_raw = 0.0;
    double norm_cdf = 0.0;
    double mean_doi = 0.0;
    double mean_smol = 0.0;
    double mean_diff = 0.0;
    double rel_diff = 0.0;
    std::size_t truncated_cells = 0;
    std::string error;  ///< empty when the cell succeeded
};

struct SweepOptions {
    std::size_t stride = 1;
    bool densities = true;
    bool cdfs = true;
    unsigned threads = 1;
    Truncation truncation;
};

/// One row per (lambda, r_b), lambda outer; r_b replaces the template's reaction radius.
std::vector<StudyRow> sweep(const std::vector<double>& lambdas, const std::vector<double>& rbs,
                            const Geometry& geom_template, double r0, const SweepOptions& opts = {});

// ----------------------------------------------------------------------------
// Output
// ----------------------------------------------------------------------------

/// Shortest round-trip-safe decimal for v with 17 significant digits, '.' separator.
std::string format_number(double v);

/// Minimal CSV writer: header row then data rows, numbers via format_number.
class CsvWriter {
public:
    CsvWriter(std::ostream& out, const std::vector<std::string>& header);
    CsvWriter& cell(double v);
    CsvWriter& cell(std::size_t v);
    CsvWriter& cell(const std::string& v);
    void end_row();

private:
    std::ostream& out_;
    std::size_t columns_;
    std::size_t in_row_ = 0;
};

void write_study_csv(std::ostream& out, const std::vector<StudyRow>& rows);

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
};

/// Line plot as standalone SVG. Non-positive values are dropped on log axes.
void write_svg(std::ostream& out, const PlotSpec& spec, const std::vector<PlotSeries>& series);

// ----------------------------------------------------------------------------
// Command line
// ----------------------------------------------------------------------------

/// Entry point of the `doismol` tool. Returns 0 on success, 2 on usage errors, 1 on compute failures.
int run_cli(int argc, const char* const* argv);

}  // namespace doismol

#endif  // DOISMOL_HARNESS_HPP
