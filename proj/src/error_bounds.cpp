#include "phom/error_bounds.hpp"

#include <stdexcept>

namespace phom {

std::string_view status_name(RecordStatus s) {
    switch (s) {
    case RecordStatus::Ok: return "ok";
    case RecordStatus::SolverFailed: return "solver_failed";
    case RecordStatus::MeasureFailed: return "measure_failed";
    case RecordStatus::StencilFailed: return "stencil_failed";
    }
    return "?";
}

std::string_view verdict_name(Verdict v) {
    switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::HoldsWithinSlack: return "holds_within_slack";
    case Verdict::Violated: return "violated";
    case Verdict::NotChecked: return "not_checked";
    }
    return "?";
}

std::string_view measure_mode_name(MeasureMode m) {
    switch (m) {
    case MeasureMode::Auto: return "auto";
    case MeasureMode::Numerical: return "numerical";
    case MeasureMode::Analytic: return "analytic";
    }
    return "?";
}

MeasureMode parse_measure_mode(std::string_view name) {
    for (MeasureMode m : {MeasureMode::Auto, MeasureMode::Numerical, MeasureMode::Analytic})
        if (measure_mode_name(m) == name) return m;
    throw ConfigError("unknown measure mode '" + std::string(name) + "'");
}

SemiConcavityValue c_bar(const CellOperator &op, const Sym2 &q, const CellSolution &cell,
                         const GridFunction &rho, BoundSign sign, double support_tol,
                         double eps_sing) {
    const GridFunction hn = hessian_norm_sq(cell);
    double sum = 0.0;
    for (std::size_t k = 0; k < hn.size(); ++k) {
        const double weight = hn[k] * rho[k];
        const PointCoeffs c = op.field.at(k);
        const SemiConcavityValue ck =
            sign == BoundSign::Plus ? c_plus(op.spec, q, c, eps_sing) : c_minus(op.spec, q, c, eps_sing);
        if (ck.is_unbounded()) {
            if (weight > support_tol) return SemiConcavityValue::unbounded();
            continue;
        }
        sum += ck.value() * weight;
    }
    return SemiConcavityValue(0.5 * sum / static_cast<double>(hn.size()));
}

Verdict check_bounds(const HomogenizationRecord &r, double delta_num) {
    if (!r.converged()) return Verdict::NotChecked;
    const bool below = r.c_bar_minus.finite() && r.error < r.c_bar_minus.value();
    const bool above = r.c_bar_plus.finite() && r.error > r.c_bar_plus.value();
    if (!below && !above) return Verdict::Holds;
    const bool below_slack = r.c_bar_minus.finite() && r.error < r.c_bar_minus.value() - delta_num;
    const bool above_slack = r.c_bar_plus.finite() && r.error > r.c_bar_plus.value() + delta_num;
    return below_slack || above_slack ? Verdict::Violated : Verdict::HoldsWithinSlack;
}

GridFunction analytic_measure(const CellOperator &op) {
    if (!op.field.separable())
        throw std::invalid_argument("analytic_measure: operator coefficients are not separable");
    const GridFunction &s = op.field.scale();
    const double hm = harmonic_mean(s);
    GridFunction rho(s.grid());
    for (std::size_t k = 0; k < rho.size(); ++k) rho[k] = hm / s[k];
    return rho;
}

std::pair<SemiConcavityValue, SemiConcavityValue> corollary_sep_bound(const CellOperator &op,
                                                                      const Sym2 &q,
                                                                      const CellSolution &cell) {
    if (!op.field.separable())
        throw std::invalid_argument("corollary_sep_bound: operator coefficients are not separable");
    // C(Q, y) rho(y) = s(y) C(Q) HM(s) / s(y): the multiplier cancels.
    const GridFunction hn = hessian_norm_sq(cell);
    const double integral = harmonic_mean(op.field.scale()) * hn.mean();

    PointCoeffs base = op.field.at(0);
    base.scale = 1.0;
    const auto bound = [&](SemiConcavityValue c) {
        if (c.is_unbounded()) return integral > 0.0 ? c : SemiConcavityValue(0.0);
        return SemiConcavityValue(0.5 * c.value() * integral);
    };
    return {bound(c_minus(op.spec, q, base)), bound(c_plus(op.spec, q, base))};
}

HomogenizationRecord homogenize(const CellOperator &op, const Sym2 &q,
                                const PipelineParams &params, std::uint64_t seed,
                                PipelineDetail *detail) {
    HomogenizationRecord r;
    r.q = q;
    r.n = op.grid().n();
    r.scheme = params.scheme.kind;
    r.seed = seed;

    CellSolution cell;
    try {
        cell = solve_cell(op, params.scheme, q, params.solver);
    } catch (const CellConvergenceError &e) {
        r.status = RecordStatus::SolverFailed;
        r.message = e.what();
        r.f_bar = e.partial().f_bar;
        r.iterations = e.partial().iterations;
        r.residual = e.partial().residual;
        return r;
    }
    r.f_bar = cell.f_bar;
    r.iterations = cell.iterations;
    r.residual = cell.residual;

    const bool analytic = params.measure_mode == MeasureMode::Analytic ||
                          (params.measure_mode == MeasureMode::Auto && op.field.separable());
    GridFunction rho;
    if (analytic) {
        rho = analytic_measure(op);
    } else {
        try {
            InvariantMeasure m = invariant_measure(op, q, params.measure);
            r.measure_iterations = m.iterations;
            r.measure_residual = m.residual;
            rho = std::move(m.rho);
        } catch (const StencilError &e) {
            r.status = RecordStatus::StencilFailed;
            r.message = e.what();
            return r;
        } catch (const ConvergenceError &e) {
            r.status = RecordStatus::MeasureFailed;
            r.message = e.what();
            return r;
        }
    }

    r.l_bar = homog_linearized(op, q, rho);
    r.error = r.f_bar - r.l_bar;
    r.c_bar_plus = c_bar(op, q, cell, rho, BoundSign::Plus);
    r.c_bar_minus = c_bar(op, q, cell, rho, BoundSign::Minus);
    r.verdict = check_bounds(r, params.slack.delta(params.solver.tol));
    if (detail) {
        detail->cell = std::move(cell);
        detail->rho = std::move(rho);
    }
    return r;
}

}  // namespace phom
