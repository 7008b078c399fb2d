#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "phom/cell_solver.hpp"
#include "phom/linear_homogenization.hpp"

namespace phom {

enum class RecordStatus { Ok, SolverFailed, MeasureFailed, StencilFailed };
std::string_view status_name(RecordStatus s);

enum class Verdict { Holds, HoldsWithinSlack, Violated, NotChecked };
std::string_view verdict_name(Verdict v);

/// Outcome of homogenizing one Q: F_bar, the homogenized linearization L_bar
/// at the same Q, and the bounds on their difference.
struct HomogenizationRecord {
    Sym2 q;
    double f_bar = 0.0;
    double l_bar = 0.0;
    double error = 0.0;  // f_bar - l_bar
    SemiConcavityValue c_bar_plus;
    SemiConcavityValue c_bar_minus;  // signed, <= 0; unbounded means -inf
    Verdict verdict = Verdict::NotChecked;

    long iterations = 0;
    double residual = 0.0;
    long measure_iterations = 0;
    double measure_residual = 0.0;
    int n = 0;
    SchemeKind scheme = SchemeKind::Standard;
    std::uint64_t seed = 0;
    RecordStatus status = RecordStatus::Ok;
    std::string message;

    bool converged() const { return status == RecordStatus::Ok; }
};

enum class BoundSign { Plus, Minus };

/// 1/2 mean(C(Q, y) |D^2 u|^2 rho). Unbounded when C is unbounded at a point
/// where |D^2 u|^2 rho exceeds support_tol.
SemiConcavityValue c_bar(const CellOperator &op, const Sym2 &q, const CellSolution &cell,
                         const GridFunction &rho, BoundSign sign, double support_tol = 1e-14,
                         double eps_sing = kDefaultSingularEps);

/// Numerical slack for check_bounds: tol_factor * solver tol, plus the
/// discretization estimate from a refinement pair when one is available.
struct SlackPolicy {
    double tol_factor = 10.0;
    std::optional<double> refinement_estimate;

    double delta(double solver_tol) const {
        return tol_factor * solver_tol + refinement_estimate.value_or(0.0);
    }
};

/// Where error sits relative to [c_bar_minus, c_bar_plus]. An unbounded side
/// never fails.
Verdict check_bounds(const HomogenizationRecord &record, double delta_num);

/// Bounds for s(y) F0(Q) from the analytic measure HM(s)/s:
/// 1/2 C(Q) HM(s) mean(|D^2 u|^2), with C the constants of F0.
/// std::invalid_argument if the operator is not separable.
std::pair<SemiConcavityValue, SemiConcavityValue> corollary_sep_bound(const CellOperator &op,
                                                                      const Sym2 &q,
                                                                      const CellSolution &cell);

/// HM(s)/s for a separable operator.
GridFunction analytic_measure(const CellOperator &op);

enum class MeasureMode { Auto, Numerical, Analytic };
std::string_view measure_mode_name(MeasureMode m);
MeasureMode parse_measure_mode(std::string_view name);

struct PipelineParams {
    SchemeSpec scheme;
    SolverParams solver;
    MeasureParams measure;
    MeasureMode measure_mode = MeasureMode::Auto;
    SlackPolicy slack;
};

/// Intermediate fields of a pipeline run, for diagnostics output.
struct PipelineDetail {
    CellSolution cell;
    GridFunction rho;
};

/// Cell solve, measure, L_bar, both bounds and the verdict for one Q.
/// Solver and measure failures are captured in the record status.
HomogenizationRecord homogenize(const CellOperator &op, const Sym2 &q,
                                const PipelineParams &params, std::uint64_t seed = 0,
                                PipelineDetail *detail = nullptr);

}  // namespace phom
