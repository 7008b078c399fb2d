#include "phom/cell_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <sstream>

#include "detail/kernels.hpp"

namespace phom {

std::string_view scheme_name(SchemeKind k) {
    switch (k) {
    case SchemeKind::Standard: return "standard";
    case SchemeKind::Monotone: return "monotone";
    case SchemeKind::Filtered: return "filtered";
    }
    return "?";
}

SchemeKind parse_scheme(std::string_view name) {
    for (SchemeKind k : {SchemeKind::Standard, SchemeKind::Monotone, SchemeKind::Filtered})
        if (scheme_name(k) == name) return k;
    throw ConfigError("unknown scheme '" + std::string(name) + "'");
}

void SchemeSpec::validate() const {
    if (kind == SchemeKind::Standard) return;
    if (directions.empty()) throw ConfigError("monotone scheme needs at least one direction");
    bool has_x = false, has_y = false;
    for (std::size_t a = 0; a < directions.size(); ++a) {
        const Offset p = directions[a];
        if (p.di == 0 && p.dj == 0) throw ConfigError("zero stencil direction");
        if (std::max(std::abs(p.di), std::abs(p.dj)) > detail::kMaxReach)
            throw ConfigError("stencil direction wider than supported reach");
        has_x |= p.dj == 0;
        has_y |= p.di == 0;
        for (std::size_t b = a + 1; b < directions.size(); ++b)
            if (parallel(p, directions[b])) throw ConfigError("parallel stencil directions");
    }
    if (!has_x || !has_y) throw ConfigError("monotone scheme needs both axis directions");
    if (kind == SchemeKind::Filtered && !(switch_tol >= 0.0))
        throw ConfigError("filter switch_tol must be nonnegative");
}

GridFunction discrete_F(const CellOperator &op, const SchemeSpec &scheme, const Sym2 &q,
                        const GridFunction &u) {
    if (!(u.grid() == op.grid())) throw ConfigError("discrete_F: grid mismatch");
    scheme.validate();
    detail::PaddedField pad(op.grid().n());
    pad.fill(u.values());
    GridFunction out(op.grid());
    detail::Workspace ws;
    detail::evaluate(op, scheme, q, pad, out.values(), ws);
    return out;
}

double cfl_time_step(const CellOperator &op, const Sym2 &q) {
    const double h = op.grid().h();
    return h * h / (4.0 * op.ellipticity_max(q)) * 0.5;
}

CellSolution solve_cell(const CellOperator &op, const SchemeSpec &scheme, const Sym2 &q,
                        const SolverParams &params) {
    scheme.validate();
    const TorusGrid &g = op.grid();
    const std::size_t size = g.size();

    CellSolution sol;
    sol.u = GridFunction(g);
    sol.dt_used = params.dt.value_or(cfl_time_step(op, q));
    const double dt = sol.dt_used;
    if (!(dt > 0.0)) throw ConfigError("time step must be positive");

    detail::PaddedField pad(g.n());
    std::vector<double> f(size);
    detail::Workspace ws;
    auto u = sol.u.values();

    for (long it = 0;; ++it) {
        pad.fill(u);
        detail::evaluate(op, scheme, q, pad, f, ws);

        double sum = 0.0;
        for (double v : f) sum += v;
        const double f_bar = sum / static_cast<double>(size);
        double res = 0.0;
        for (double v : f) res = std::max(res, std::abs(v - f_bar));

        sol.f_bar = f_bar;
        sol.residual = res;
        sol.iterations = it;
        if (params.history_stride > 0 && it % params.history_stride == 0)
            sol.history.emplace_back(it, res);
        if (!std::isfinite(res)) {
            throw CellConvergenceError("cell solver diverged (non-finite residual)", std::move(sol));
        }
        if (res <= params.tol) break;
        if (it >= params.max_iter) {
            std::ostringstream msg;
            msg << "cell solver did not converge in " << params.max_iter
                << " iterations (residual " << res << ", tol " << params.tol << ")";
            throw CellConvergenceError(msg.str(), std::move(sol));
        }

        // Explicit Euler step with the constant right-hand side, then recentre.
        const double shift = f_bar + params.rhs_const;
        double mean_u = 0.0;
        for (std::size_t k = 0; k < size; ++k) {
            u[k] += dt * (f[k] - shift);
            mean_u += u[k];
        }
        mean_u /= static_cast<double>(size);
        for (double &v : u) v -= mean_u;
    }
    if (params.history_stride > 0 &&
        (sol.history.empty() || sol.history.back().first != sol.iterations))
        sol.history.emplace_back(sol.iterations, sol.residual);
    return sol;
}

GridFunction hessian_norm_sq(const GridFunction &u) {
    const auto hess = hessian_standard(u);
    GridFunction out(u.grid());
    for (std::size_t k = 0; k < hess.size(); ++k) {
        const double nrm = hess[k].norm();
        out[k] = nrm * nrm;
    }
    return out;
}

GridFunction hessian_norm_sq(const CellSolution &sol) { return hessian_norm_sq(sol.u); }

void write_history_csv(std::ostream &os, const CellSolution &sol) {
    os << "iteration,residual\n";
    os.precision(17);
    for (const auto &[it, r] : sol.history) os << it << ',' << r << '\n';
}

}  // namespace phom
