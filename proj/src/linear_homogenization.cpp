#include "phom/linear_homogenization.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace phom {

LinearizedStencil::LinearizedStencil(const CellOperator &op, const Sym2 &q,
                                     std::vector<Offset> directions, bool allow_widen)
    : grid_(op.grid()), dirs_(std::move(directions)) {
    const int n = grid_.n();
    const double h2 = grid_.h() * grid_.h();
    std::vector<Sym2> grads(grid_.size());
    for (std::size_t k = 0; k < grid_.size(); ++k) grads[k] = grad_Q(op.spec, q, op.field.at(k));

    const auto build = [&](const std::vector<Offset> &dirs, int &bad_i, int &bad_j) {
        rate_.assign(grid_.size() * dirs.size(), 0.0);
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                const std::size_t k = grid_.index(i, j);
                const auto w = decompose_directional(grads[k], dirs);
                if (!w) {
                    bad_i = i;
                    bad_j = j;
                    return false;
                }
                for (std::size_t d = 0; d < dirs.size(); ++d)
                    rate_[k * dirs.size() + d] = (*w)[d] / (h2 * dirs[d].norm_sq());
            }
        }
        return true;
    };

    int bi = -1, bj = -1;
    if (!build(dirs_, bi, bj)) {
        const auto wide = widened_directions();
        if (!allow_widen || dirs_.size() >= wide.size() || !build(wide, bi, bj)) {
            std::ostringstream msg;
            msg << "linearized coefficients at grid point (" << bi << ", " << bj
                << ") are not representable on the stencil; widen the direction set";
            throw StencilError(msg.str(), bi, bj);
        }
        dirs_ = wide;
    }

    for (std::size_t k = 0; k < grid_.size(); ++k) {
        double s = 0.0;
        for (std::size_t d = 0; d < dirs_.size(); ++d) s += rate(k, d);
        max_exit_ = std::max(max_exit_, 2.0 * s);
    }
}

GridFunction LinearizedStencil::apply(const GridFunction &phi) const {
    const int n = grid_.n();
    GridFunction out(grid_);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const std::size_t k = grid_.index(i, j);
            const double c = phi[k];
            double v = 0.0;
            for (std::size_t d = 0; d < dirs_.size(); ++d) {
                const Offset p = dirs_[d];
                v += rate(k, d) * (phi.at(i + p.di, j + p.dj) + phi.at(i - p.di, j - p.dj) - 2.0 * c);
            }
            out[k] = v;
        }
    }
    return out;
}

GridFunction LinearizedStencil::apply_adjoint(const GridFunction &rho) const {
    // (L^T rho)(m) = sum_d [r(m-p) rho(m-p) + r(m+p) rho(m+p) - 2 r(m) rho(m)]
    const int n = grid_.n();
    GridFunction out(grid_);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const std::size_t k = grid_.index(i, j);
            double v = 0.0;
            for (std::size_t d = 0; d < dirs_.size(); ++d) {
                const Offset p = dirs_[d];
                const std::size_t kp = grid_.index(i + p.di, j + p.dj);
                const std::size_t km = grid_.index(i - p.di, j - p.dj);
                v += rate(km, d) * rho[km] + rate(kp, d) * rho[kp] - 2.0 * rate(k, d) * rho[k];
            }
            out[k] = v;
        }
    }
    return out;
}

InvariantMeasure invariant_measure(const CellOperator &op, const Sym2 &q,
                                   const MeasureParams &params) {
    const LinearizedStencil stencil(op, q, params.directions, params.allow_widen);
    return invariant_measure(stencil, params);
}

InvariantMeasure invariant_measure(const LinearizedStencil &stencil, const MeasureParams &params) {
    const TorusGrid &g = stencil.grid();
    InvariantMeasure m;
    m.rho = GridFunction(g, 1.0);
    if (stencil.max_exit_rate() == 0.0) return m;

    // Half the largest step keeping I + dt L^T nonnegative.
    const double dt = 0.5 / stencil.max_exit_rate();
    GridFunction &rho = m.rho;
    for (long it = 0;; ++it) {
        const GridFunction lt = stencil.apply_adjoint(rho);
        m.residual = lt.max_abs();
        m.iterations = it;

        double increment = 0.0;
        double sum = 0.0;
        std::vector<double> next(g.size());
        for (std::size_t k = 0; k < g.size(); ++k) {
            next[k] = rho[k] + dt * lt[k];
            sum += next[k];
        }
        const double scale = static_cast<double>(g.size()) / sum;
        for (std::size_t k = 0; k < g.size(); ++k) {
            next[k] *= scale;
            increment = std::max(increment, std::abs(next[k] - rho[k]));
        }
        if (increment <= params.increment_tol && m.residual <= params.residual_tol) return m;
        if (!std::isfinite(m.residual) || it >= params.max_iter) {
            std::ostringstream msg;
            msg << "invariant measure did not converge in " << it << " iterations (residual "
                << m.residual << ", increment " << increment << ")";
            throw ConvergenceError(msg.str());
        }
        std::copy(next.begin(), next.end(), rho.values().begin());
    }
}

double homog_linearized(const CellOperator &op, const Sym2 &q, const GridFunction &rho) {
    double s = 0.0;
    for (std::size_t k = 0; k < rho.size(); ++k) s += op.eval_at(k, q) * rho[k];
    return s / static_cast<double>(rho.size());
}

double separable_analytic(const CellOperator &op, const Sym2 &q) {
    if (!op.field.separable())
        throw std::invalid_argument("separable_analytic: operator coefficients are not separable");
    PointCoeffs base = op.field.at(0);
    base.scale = 1.0;
    return harmonic_mean(op.field.scale()) * eval(op.spec, q, base);
}

double AnsatzFit::predict(const Sym2 &q) const {
    double lmin, lmax;
    eigenvalues(q.a11, q.a12, q.a22, lmin, lmax);
    if (family == Family::PucciF && lmax <= 0.0) return a_bar_linear * (lmin + lmax);
    return a_bar_max * lmax + a_bar_min * lmin;
}

AnsatzFit nonseparable_ansatz(const CellOperator &op, const MeasureParams &params,
                              double fit_threshold) {
    if (op.spec.family != Family::PucciF && op.spec.family != Family::HPair)
        throw std::invalid_argument("nonseparable_ansatz: needs an HPair or PucciF operator");

    AnsatzFit fit;
    fit.family = op.spec.family;

    // One eigenvalue of each sign: lambda_max = 1 along e1, lambda_min = -1 along e2.
    const Sym2 q_mixed = Sym2::diag(1.0, -1.0);
    const InvariantMeasure mixed = invariant_measure(op, q_mixed, params);
    double s_max = 0.0, s_min = 0.0;
    for (std::size_t k = 0; k < mixed.rho.size(); ++k) {
        const Sym2 g = grad_Q(op.spec, q_mixed, op.field.at(k));
        s_max += g.a11 * mixed.rho[k];
        s_min += g.a22 * mixed.rho[k];
    }
    const double count = static_cast<double>(mixed.rho.size());
    fit.a_bar_max = s_max / count;
    fit.a_bar_min = s_min / count;

    if (fit.family == Family::PucciF) {
        const Sym2 q_neg = Sym2::diag(-1.0, -2.0);
        const InvariantMeasure neg = invariant_measure(op, q_neg, params);
        fit.a_bar_linear = homog_linearized(op, q_neg, neg.rho) / q_neg.trace();
    }

    const Sym2 probes[] = {Sym2::diag(2.0, 1.0), Sym2::diag(-1.0, 1.0), Sym2::diag(0.5, 2.0),
                           Sym2::diag(1.0, -0.5)};
    for (const Sym2 &q : probes) {
        const InvariantMeasure m = invariant_measure(op, q, params);
        const double l_bar = homog_linearized(op, q, m.rho);
        const double err = std::abs(l_bar - fit.predict(q));
        fit.fit_residual = std::max(fit.fit_residual, err);
        if (err > fit_threshold * (1.0 + std::abs(l_bar))) fit.fit_ok = false;
    }
    return fit;
}

}  // namespace phom
