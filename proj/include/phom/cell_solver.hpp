#pragma once

#include <iosfwd>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "phom/coefficients.hpp"
#include "phom/errors.hpp"
#include "phom/grid.hpp"

namespace phom {

enum class SchemeKind { Standard, Monotone, Filtered };

std::string_view scheme_name(SchemeKind k);
SchemeKind parse_scheme(std::string_view name);

/// Spatial discretization of F(Q + D^2u, y).
///
/// Standard: 9-point Hessian, exact eigenvalues.
/// Monotone: wide-stencil eigenvalue approximation, lambda_min/max as the
///   min/max over `directions` of v^T (Q + D^2u) v / |v|^2, trace from the
///   two axis directions.
/// Filtered: the standard value where |standard - monotone| <=
///   switch_tol (1 + |monotone|), the monotone value elsewhere.
struct SchemeSpec {
    SchemeKind kind = SchemeKind::Standard;
    std::vector<Offset> directions = default_directions();
    double switch_tol = 1.0;

    static SchemeSpec standard() { return {}; }
    static SchemeSpec monotone(std::vector<Offset> dirs = default_directions()) {
        return {SchemeKind::Monotone, std::move(dirs), 1.0};
    }
    static SchemeSpec filtered(double tol = 1.0) {
        return {SchemeKind::Filtered, default_directions(), tol};
    }

    /// Directions nonempty, pairwise non-parallel, containing both axes.
    void validate() const;
};

struct SolverParams {
    std::optional<double> dt;   // default: CFL bound h^2 / (4 Lambda), halved
    double tol = 1e-8;
    long max_iter = 10'000'000;
    double rhs_const = 0.0;
    long history_stride = 0;    // 0 disables the residual history
};

struct CellSolution {
    GridFunction u;           // corrector, mean zero
    double f_bar = 0.0;       // homogenized value
    long iterations = 0;
    double residual = 0.0;    // max |F(Q + D^2u, y) - f_bar|
    double dt_used = 0.0;
    std::vector<std::pair<long, double>> history;
};

/// Thrown when solve_cell hits max_iter; carries the last iterate.
class CellConvergenceError : public ConvergenceError {
public:
    CellConvergenceError(const std::string &what, CellSolution partial)
        : ConvergenceError(what), partial_(std::move(partial)) {}
    const CellSolution &partial() const { return partial_; }

private:
    CellSolution partial_;
};

/// Pointwise F(Q + D^2u(y), y) under the given scheme.
GridFunction discrete_F(const CellOperator &op, const SchemeSpec &scheme, const Sym2 &q,
                        const GridFunction &u);

/// Default explicit time step h^2 / (8 Lambda_max).
double cfl_time_step(const CellOperator &op, const Sym2 &q);

/// Parabolic relaxation u <- u + dt (F(Q + D^2u) - mean F - rhs_const),
/// recentred to mean zero every step, until max |F - mean F| <= tol.
CellSolution solve_cell(const CellOperator &op, const SchemeSpec &scheme, const Sym2 &q,
                        const SolverParams &params = {});

/// Squared Frobenius norm of the standard discrete Hessian of the corrector.
GridFunction hessian_norm_sq(const CellSolution &sol);
GridFunction hessian_norm_sq(const GridFunction &u);

/// "iteration,residual" rows of the solution's history.
void write_history_csv(std::ostream &os, const CellSolution &sol);

}  // namespace phom
