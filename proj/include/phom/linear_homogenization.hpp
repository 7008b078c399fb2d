#pragma once

#include <vector>

#include "phom/coefficients.hpp"
#include "phom/errors.hpp"
#include "phom/grid.hpp"

namespace phom {

/// Monotone discretization of the frozen-coefficient linearized operator
/// L^Q phi(y) = grad_Q F(Q, y) : D^2 phi(y): at every point the gradient is
/// split into nonnegative weights on the stencil directions.
class LinearizedStencil {
public:
    /// Throws StencilError when some point's gradient is not representable
    /// on `directions` (and `allow_widen` is false or widening also fails).
    LinearizedStencil(const CellOperator &op, const Sym2 &q,
                      std::vector<Offset> directions = default_directions(),
                      bool allow_widen = true);

    const TorusGrid &grid() const { return grid_; }
    const std::vector<Offset> &directions() const { return dirs_; }
    /// Weight of direction d at point k (already divided by h^2 |p|^2).
    double rate(std::size_t k, std::size_t d) const { return rate_[k * dirs_.size() + d]; }
    /// Largest total jump rate 2 sum_d rate(k, d).
    double max_exit_rate() const { return max_exit_; }

    /// (L phi)(y) for the frozen linearization (second-order part only).
    GridFunction apply(const GridFunction &phi) const;
    /// Transpose of apply with respect to the uniform grid measure.
    GridFunction apply_adjoint(const GridFunction &rho) const;

private:
    TorusGrid grid_;
    std::vector<Offset> dirs_;
    std::vector<double> rate_;
    double max_exit_ = 0.0;
};

class StencilError : public ConfigError {
public:
    StencilError(const std::string &what, int i, int j) : ConfigError(what), i_(i), j_(j) {}
    int i() const { return i_; }
    int j() const { return j_; }

private:
    int i_, j_;
};

struct InvariantMeasure {
    GridFunction rho;        // mean(rho) = 1, i.e. h^2 sum rho = 1
    double residual = 0.0;   // max |L^T rho|
    long iterations = 0;
};

struct MeasureParams {
    double increment_tol = 1e-12;   // max |rho_{n+1} - rho_n|
    double residual_tol = 1e-10;    // max |L^T rho|
    long max_iter = 10'000'000;
    std::vector<Offset> directions = default_directions();
    bool allow_widen = true;
};

/// Stationary density of the jump chain generated by the monotone
/// linearization at q, by power iteration on I + dt L^T.
InvariantMeasure invariant_measure(const CellOperator &op, const Sym2 &q,
                                   const MeasureParams &params = {});
InvariantMeasure invariant_measure(const LinearizedStencil &stencil,
                                   const MeasureParams &params = {});

/// h^2 sum F(Q, y) rho(y).
double homog_linearized(const CellOperator &op, const Sym2 &q, const GridFunction &rho);

/// HM(s) F0(Q) for s(y) F0(Q). std::invalid_argument if the operator is not separable.
double separable_analytic(const CellOperator &op, const Sym2 &q);

/// Effective coefficients of the linearized operator, so that
/// L^Q(Q) ~ a_bar_max lambda_max + a_bar_min lambda_min whenever lambda_max > 0,
/// and a_bar_linear tr Q for negative semidefinite Q (PucciF only).
struct AnsatzFit {
    double a_bar_max = 0.0;     // weight of lambda_max
    double a_bar_min = 0.0;     // weight of lambda_min
    double a_bar_linear = 0.0;  // PucciF on negative semidefinite Q
    Family family = Family::PucciF;
    double fit_residual = 0.0;  // max |L^Q(Q) - prediction| over the probe set
    bool fit_ok = true;

    double predict(const Sym2 &q) const;
};

/// Extracts the coefficients from the linearization at diag(1, -1) and checks
/// the fit on a small probe set. HPair and PucciF only.
AnsatzFit nonseparable_ansatz(const CellOperator &op, const MeasureParams &params = {},
                              double fit_threshold = 1e-6);

}  // namespace phom
