#include "phom/operators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "phom/errors.hpp"

namespace phom {

namespace {

// Bounds on dS_k/dx_j over all three-argument inputs, rounded outward.
constexpr double kSmoothMaxSlopeBound = 1.5;
constexpr double kSmoothMaxSlopeFloor = -0.25;

struct SpectralGrad {
    double d_min = 0.0;  // d base / d lambda_min
    double d_max = 0.0;  // d base / d lambda_max
};

SpectralGrad spectral_grad(const OperatorSpec &spec, double lmin, double lmax, double lo,
                           double hi) {
    const double b = hi - lo;
    switch (spec.family) {
    case Family::HPair:
        return {lo, hi};
    case Family::PucciStandard:
        return {lo + (lmin > 0.0 ? b : 0.0), lo + (lmax > 0.0 ? b : 0.0)};
    case Family::PucciF:
        return {lo, lo + (lmax > 0.0 ? b : 0.0)};
    case Family::PucciSmoothed: {
        const std::array<double, 3> x{lmin, lmax, 0.0};
        std::array<double, 3> g{};
        smooth_max_grad(x, spec.k, g);
        return {lo + b * g[0], lo + b * g[1]};
    }
    case Family::MongeAmpereType:
        return {lo * (1.0 + (lmin > 0.0 ? positive_part(lmax) : 0.0)),
                lo * (1.0 + (lmax > 0.0 ? positive_part(lmin) : 0.0))};
    case Family::Linear:
        break;
    }
    return {};
}

}  // namespace

std::string_view family_name(Family f) {
    switch (f) {
    case Family::Linear: return "linear";
    case Family::HPair: return "h_pair";
    case Family::PucciStandard: return "pucci";
    case Family::PucciF: return "pucci_f";
    case Family::PucciSmoothed: return "pucci_smoothed";
    case Family::MongeAmpereType: return "monge_ampere";
    }
    return "?";
}

Family parse_family(std::string_view name) {
    for (Family f : {Family::Linear, Family::HPair, Family::PucciStandard, Family::PucciF,
                     Family::PucciSmoothed, Family::MongeAmpereType})
        if (family_name(f) == name) return f;
    throw ConfigError("unknown operator family '" + std::string(name) + "'");
}

void OperatorSpec::validate() const {
    if (family == Family::PucciSmoothed && !(k > 0.0))
        throw DomainError("smoothed operator needs k > 0");
}

bool OperatorSpec::convex() const {
    return family == Family::Linear || family == Family::PucciStandard ||
           family == Family::PucciF;
}

double smooth_max(std::span<const double> x, double k) {
    double top = k * x[0];
    for (double v : x) top = std::max(top, k * v);
    double num = 0.0;
    double den = 0.0;
    for (double v : x) {
        const double w = std::exp(k * v - top);
        num += v * w;
        den += w;
    }
    return num / den;
}

double smooth_max_grad(std::span<const double> x, double k, std::span<double> grad) {
    double top = k * x[0];
    for (double v : x) top = std::max(top, k * v);
    double den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        grad[i] = std::exp(k * x[i] - top);
        den += grad[i];
    }
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        grad[i] /= den;
        s += grad[i] * x[i];
    }
    for (std::size_t i = 0; i < x.size(); ++i) grad[i] *= 1.0 + k * (x[i] - s);
    return s;
}

double eval_spectral(const OperatorSpec &spec, double tr, double lmin, double lmax, double lo,
                     double hi) {
    const double b = hi - lo;
    switch (spec.family) {
    case Family::HPair:
        return lo * lmin + hi * lmax;
    case Family::PucciStandard:
        return lo * tr + b * (positive_part(lmin) + positive_part(lmax));
    case Family::PucciF:
        return lo * tr + b * positive_part(lmax);
    case Family::PucciSmoothed: {
        const std::array<double, 3> x{lmin, lmax, 0.0};
        return lo * tr + b * smooth_max(x, spec.k);
    }
    case Family::MongeAmpereType:
        return lo * (tr + positive_part(lmin) * positive_part(lmax));
    case Family::Linear:
        break;
    }
    throw std::logic_error("eval_spectral called for the linear family");
}

double eval(const OperatorSpec &spec, const Sym2 &q, const PointCoeffs &c) {
    if (spec.family == Family::Linear) return c.scale * frobenius(spec.linear_matrix, q);
    double lmin, lmax;
    eigenvalues(q.a11, q.a12, q.a22, lmin, lmax);
    return c.scale * eval_spectral(spec, q.trace(), lmin, lmax, c.lo, c.hi);
}

Sym2 grad_Q(const OperatorSpec &spec, const Sym2 &q, const PointCoeffs &c) {
    if (spec.family == Family::Linear) return c.scale * spec.linear_matrix;
    const EigenFrame f = eigen_decompose(q);
    const SpectralGrad g = spectral_grad(spec, f.lambda_min, f.lambda_max, c.lo, c.hi);
    return c.scale * (g.d_min * Sym2::outer(f.v_min) + g.d_max * Sym2::outer(f.v_max));
}

double linearized_eval(const OperatorSpec &spec, const Sym2 &q_base, const Sym2 &m,
                       const PointCoeffs &c) {
    return frobenius(grad_Q(spec, q_base, c), m - q_base) + eval(spec, q_base, c);
}

SemiConcavityValue c_plus(const OperatorSpec &spec, const Sym2 &q, const PointCoeffs &c,
                          double eps_sing) {
    double lmin, lmax;
    eigenvalues(q.a11, q.a12, q.a22, lmin, lmax);
    const double b = c.hi - c.lo;
    const double gap = lmax - lmin;
    const auto ratio = [&](double num, double den) {
        return den < eps_sing ? SemiConcavityValue::unbounded()
                              : SemiConcavityValue(c.scale * num / den);
    };
    switch (spec.family) {
    case Family::Linear:
        return SemiConcavityValue(0.0);
    case Family::HPair:
        if (c.hi <= c.lo) return SemiConcavityValue(0.0);
        return ratio(c.hi - c.lo, gap);
    case Family::PucciStandard: {
        if (b == 0.0) return SemiConcavityValue(0.0);
        if (lmin > 0.0 && lmax > 0.0) {
            if (lmin < eps_sing) return SemiConcavityValue::unbounded();
            return SemiConcavityValue(c.scale * std::max(b / (lmin + lmax), c.hi / (2.0 * lmin)));
        }
        return ratio(b, 2.0 * std::min(std::abs(lmin), std::abs(lmax)));
    }
    case Family::PucciF: {
        if (b == 0.0) return SemiConcavityValue(0.0);
        if (lmax > 0.0) {
            if (gap < eps_sing || lmax < eps_sing) return SemiConcavityValue::unbounded();
            return SemiConcavityValue(c.scale * b * std::max(1.0 / gap, 1.0 / (2.0 * lmax)));
        }
        return ratio(b, 2.0 * std::abs(lmax));
    }
    case Family::MongeAmpereType:
        if (lmax <= 0.0) return SemiConcavityValue(c.scale * c.lo);
        return SemiConcavityValue::unbounded();
    case Family::PucciSmoothed:
        return SemiConcavityValue::unbounded();
    }
    return SemiConcavityValue::unbounded();
}

SemiConcavityValue c_minus(const OperatorSpec &spec, const Sym2 &q, const PointCoeffs &c,
                           double eps_sing) {
    switch (spec.family) {
    case Family::Linear:
    case Family::PucciStandard:
    case Family::PucciF:
        return SemiConcavityValue(0.0);
    case Family::HPair: {
        if (c.lo <= c.hi) return SemiConcavityValue(0.0);
        double lmin, lmax;
        eigenvalues(q.a11, q.a12, q.a22, lmin, lmax);
        const double gap = lmax - lmin;
        if (gap < eps_sing) return SemiConcavityValue::unbounded();
        return SemiConcavityValue(-c.scale * (c.lo - c.hi) / gap);
    }
    case Family::MongeAmpereType: {
        double lmin, lmax;
        eigenvalues(q.a11, q.a12, q.a22, lmin, lmax);
        if (lmax <= 0.0) return SemiConcavityValue(0.0);
        return SemiConcavityValue::unbounded();
    }
    case Family::PucciSmoothed:
        return SemiConcavityValue::unbounded();
    }
    return SemiConcavityValue::unbounded();
}

double c_plus_scalar_max(double a, double b, double x) {
    if (x == 0.0) throw DomainError("c_plus_scalar_max: x must be nonzero");
    return std::abs(a - b) / (2.0 * std::abs(x));
}

double ellipticity_bound(const OperatorSpec &spec, const PointCoeffs &c, const Sym2 &q) {
    switch (spec.family) {
    case Family::Linear: {
        double lmin, lmax;
        const Sym2 &a = spec.linear_matrix;
        eigenvalues(a.a11, a.a12, a.a22, lmin, lmax);
        return c.scale * lmax;
    }
    case Family::HPair:
        return c.scale * std::max(c.lo, c.hi);
    case Family::PucciStandard:
    case Family::PucciF:
        return c.scale * c.hi;
    case Family::PucciSmoothed:
        return c.scale * (c.lo + kSmoothMaxSlopeBound * (c.hi - c.lo));
    case Family::MongeAmpereType: {
        // lambda^+ of Q + D^2u is not bounded a priori; allow an O(|Q|) corrector.
        double lmin, lmax;
        eigenvalues(q.a11, q.a12, q.a22, lmin, lmax);
        const double reach = 2.0 * std::max(std::abs(lmin), std::abs(lmax)) + 1.0;
        return c.scale * c.lo * (1.0 + reach);
    }
    }
    return c.scale * c.hi;
}

std::string check_ellipticity(const OperatorSpec &spec, const PointCoeffs &c, double delta) {
    std::ostringstream why;
    if (!(c.scale >= delta)) {
        why << "multiplier " << c.scale << " below " << delta;
        return why.str();
    }
    switch (spec.family) {
    case Family::Linear: {
        const Sym2 &a = spec.linear_matrix;
        double lmin, lmax;
        eigenvalues(a.a11, a.a12, a.a22, lmin, lmax);
        if (!(lmin >= delta)) why << "A0 has eigenvalue " << lmin << " below " << delta;
        break;
    }
    case Family::HPair:
        if (!(c.lo >= delta && c.hi >= delta))
            why << "a1 = " << c.lo << ", a2 = " << c.hi << " not >= " << delta;
        break;
    case Family::PucciStandard:
    case Family::PucciF:
    case Family::PucciSmoothed:
        if (!(c.lo >= delta)) why << "a = " << c.lo << " below " << delta;
        else if (!(c.hi >= c.lo)) why << "A = " << c.hi << " < a = " << c.lo;
        else if (spec.family == Family::PucciSmoothed &&
                 !(c.lo + kSmoothMaxSlopeFloor * (c.hi - c.lo) >= delta))
            why << "smoothed operator with a = " << c.lo << ", A = " << c.hi
                << " is not uniformly elliptic";
        break;
    case Family::MongeAmpereType:
        if (!(c.lo >= delta)) why << "a = " << c.lo << " below " << delta;
        break;
    }
    return why.str();
}

}  // namespace phom
