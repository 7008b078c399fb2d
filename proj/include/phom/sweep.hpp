#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "phom/error_bounds.hpp"

namespace phom {

inline constexpr int kSchemaVersion = 1;

struct AxisRange {
    double min = -3.0;
    double max = 3.0;
    double step = 0.25;

    /// min, min + step, ... up to max (inclusive within step / 1e6).
    std::vector<double> values() const;
};

enum class QMode { Grid, List, Angles };

/// Which Q a run visits: a lambda1 x lambda2 grid of diagonal matrices, an
/// explicit list, or diag(cos t, sin t) at equally spaced angles.
struct QSelection {
    QMode mode = QMode::Grid;
    AxisRange lambda1;
    AxisRange lambda2;
    std::vector<Sym2> list;
    int angles = 72;
    double level = 1.0;
    /// Grid mode: skip points with |lambda1 - lambda2| below this.
    double min_offdiagonal = 0.0;
};

struct OutputPaths {
    std::filesystem::path dir = "out";
    std::string csv = "sweep.csv";
    std::string report = "report.json";
};

/// Everything a run needs; round-trips through JSON.
struct ExperimentConfig {
    OperatorSpec op;
    double delta = 1e-6;
    PatternSpec scale;
    PatternSpec lo;
    PatternSpec hi;
    int grid_n = 80;
    PipelineParams pipeline;
    QSelection q;
    OutputPaths output;
    std::uint64_t seed = 0;
    int jobs = 1;

    /// Pattern seeds are seed, seed + 1, seed + 2 for scale, lo, hi.
    CellOperator build_operator() const;
    std::vector<Sym2> q_points() const;
};

/// Throws ConfigError with the offending key on malformed input.
ExperimentConfig config_from_json(const std::string &text);
ExperimentConfig load_config(const std::filesystem::path &path);
std::string config_to_json(const ExperimentConfig &config, int indent = 2);

using RecordSink = std::function<void(std::size_t index, const HomogenizationRecord &)>;

/// Homogenizes every Q of the selection on `config.jobs` workers. The sink
/// sees records in input order, one at a time.
std::vector<HomogenizationRecord> run_sweep(const ExperimentConfig &config,
                                            const RecordSink &sink = {});
std::vector<HomogenizationRecord> run_sweep(const ExperimentConfig &config,
                                            const CellOperator &op,
                                            const std::vector<Sym2> &points,
                                            const RecordSink &sink = {});

inline constexpr const char *kCsvHeader =
    "lambda1,lambda2,f_bar,l_bar,error,c_bar_minus,c_bar_plus,iterations,residual,status";

/// Diagonal entries for diagonal Q, eigenvalues (max, min) otherwise.
std::pair<double, double> record_lambdas(const Sym2 &q);
void write_csv_header(std::ostream &os);
void write_csv_row(std::ostream &os, const HomogenizationRecord &r);
std::string records_to_csv(const std::vector<HomogenizationRecord> &records);
/// Every field of the record, including the verdict and diagnostics.
std::string record_to_json(const HomogenizationRecord &r, int indent = 2);

struct SweepSummary {
    std::size_t records = 0;
    std::size_t failures = 0;
    std::size_t holds = 0;
    std::size_t holds_within_slack = 0;
    std::size_t violated = 0;
    /// Max |error| over converged records by quadrant of (lambda1, lambda2);
    /// points on an axis go to "axes".
    double max_abs_error[5] = {0, 0, 0, 0, 0};
};
SweepSummary summarize(const std::vector<HomogenizationRecord> &records);

/// JSON run report: config echo, RNG id, wall clock and the summary.
std::string report_json(const ExperimentConfig &config, const SweepSummary &summary,
                        double wall_seconds);

struct LevelSetPoint {
    double theta = 0.0;
    double f_bar = 0.0;
    double l_bar = 0.0;
    std::optional<std::pair<double, double>> f_point;  // level / f_bar along the ray
    std::optional<std::pair<double, double>> l_point;
    std::string flag;  // empty when both points exist
};

/// Level set of F_bar and of the homogenized linearization, by homogeneity
/// along rays diag(cos t, sin t). ConfigError for non-homogeneous families.
std::vector<LevelSetPoint> level_set(const ExperimentConfig &config, double level, int n_angles);
void write_level_set_csv(std::ostream &os, const std::vector<LevelSetPoint> &points);

/// Opens `path` for writing, creating parent directories; errors carry the path.
std::ofstream open_output(const std::filesystem::path &path);

}  // namespace phom
