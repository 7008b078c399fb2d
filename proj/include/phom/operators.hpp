#pragma once

#include <limits>
#include <span>
#include <string>
#include <string_view>

#include "phom/sym2.hpp"

namespace phom {

/// Operator families. With pointwise coefficients (s, lo, hi) every family is
/// evaluated as s(y) * base(Q; lo(y), hi(y)):
///
///   Linear          A0 : Q
///   HPair           lo * lambda_min + hi * lambda_max                 (a1, a2)
///   PucciStandard   a tr Q + b (lambda_min^+ + lambda_max^+)          (a, A), b = A - a
///   PucciF          a tr Q + b lambda_max^+
///   PucciSmoothed   a tr Q + b S_k(lambda_min, lambda_max, 0)
///   MongeAmpereType a (tr Q + lambda_min^+ lambda_max^+)              (a, unused)
enum class Family { Linear, HPair, PucciStandard, PucciF, PucciSmoothed, MongeAmpereType };

std::string_view family_name(Family f);
Family parse_family(std::string_view name);

struct OperatorSpec {
    Family family = Family::Linear;
    Sym2 linear_matrix = Sym2::identity();  // A0, Linear only
    double k = 1.0;                         // PucciSmoothed only

    static OperatorSpec linear(Sym2 a0 = Sym2::identity()) { return {Family::Linear, a0, 1.0}; }
    static OperatorSpec h_pair() { return {Family::HPair}; }
    static OperatorSpec pucci() { return {Family::PucciStandard}; }
    static OperatorSpec pucci_f() { return {Family::PucciF}; }
    static OperatorSpec smoothed(double k) { return {Family::PucciSmoothed, Sym2::identity(), k}; }
    static OperatorSpec monge_ampere() { return {Family::MongeAmpereType}; }

    /// Throws DomainError for k <= 0 on the smoothed family.
    void validate() const;
    /// Positively homogeneous of order one in Q.
    bool homogeneous() const { return family != Family::MongeAmpereType; }
    bool convex() const;
};

/// Coefficients at one grid point: multiplier s and the pair (lo, hi) read as
/// (a, A) for the Pucci families and as (a1, a2) for HPair.
struct PointCoeffs {
    double scale = 1.0;
    double lo = 1.0;
    double hi = 1.0;
};

/// C+(Q, x) or C-(Q, x); Unbounded on the operator's singular set.
class SemiConcavityValue {
public:
    constexpr SemiConcavityValue() = default;
    constexpr explicit SemiConcavityValue(double v) : value_(v) {}
    static constexpr SemiConcavityValue unbounded() {
        SemiConcavityValue s;
        s.unbounded_ = true;
        return s;
    }

    bool is_unbounded() const { return unbounded_; }
    bool finite() const { return !unbounded_; }
    /// +inf (C+) / -inf (C-) conventions are the caller's; value() is only
    /// meaningful when finite().
    double value() const { return value_; }

private:
    double value_ = 0.0;
    bool unbounded_ = false;
};

inline constexpr double kDefaultSingularEps = 1e-10;

/// S_k(x) = sum x_i e^{k x_i} / sum e^{k x_i}, exponents shifted by max(k x).
double smooth_max(std::span<const double> x, double k);

/// dS_k/dx_j = w_j (1 + k (x_j - S_k)) written into grad (same length as x).
double smooth_max_grad(std::span<const double> x, double k, std::span<double> grad);

/// Base operator (without the multiplier) as a function of the eigenvalues.
/// Not valid for the Linear family, which needs the full matrix.
double eval_spectral(const OperatorSpec &spec, double tr, double lmin, double lmax,
                     double lo, double hi);

double eval(const OperatorSpec &spec, const Sym2 &q, const PointCoeffs &c);

/// Derivative of eval with respect to Q (Frobenius pairing). On a repeated
/// eigenvalue the axis eigenframe is used.
Sym2 grad_Q(const OperatorSpec &spec, const Sym2 &q, const PointCoeffs &c);

/// grad_Q(q_base) : (m - q_base) + eval(q_base)
double linearized_eval(const OperatorSpec &spec, const Sym2 &q_base, const Sym2 &m,
                       const PointCoeffs &c);

/// Generalized semi-concavity constant: F(M) - L^Q(M) <= C+ |M - Q|^2 / 2.
SemiConcavityValue c_plus(const OperatorSpec &spec, const Sym2 &q, const PointCoeffs &c,
                          double eps_sing = kDefaultSingularEps);

/// Lower constant: F(M) - L^Q(M) >= C- |M - Q|^2 / 2. Signed, C- <= 0.
SemiConcavityValue c_minus(const OperatorSpec &spec, const Sym2 &q, const PointCoeffs &c,
                           double eps_sing = kDefaultSingularEps);

/// Best upper constant for f(x) = max(a x, b x): |a - b| / (2 |x|).
/// Throws DomainError for x == 0.
double c_plus_scalar_max(double a, double b, double x);

/// Upper bound on the largest eigenvalue of grad_Q over all matrices reachable
/// from q by the solver; sets the explicit time step.
double ellipticity_bound(const OperatorSpec &spec, const PointCoeffs &c, const Sym2 &q);

/// Uniform ellipticity of the coefficients at one point; returns an empty
/// string when valid, otherwise the reason.
std::string check_ellipticity(const OperatorSpec &spec, const PointCoeffs &c, double delta);

}  // namespace phom
