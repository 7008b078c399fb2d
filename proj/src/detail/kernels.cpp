#include "detail/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <sstream>

namespace phom::detail {

PaddedField::PaddedField(int n)
    : n_(n), stride_(n + 2 * kMaxReach),
      data_(static_cast<std::size_t>(stride_) * stride_, 0.0) {}

void PaddedField::fill(std::span<const double> u) {
    const int n = n_;
    for (int jj = -kMaxReach; jj < n + kMaxReach; ++jj) {
        const int j = (jj + n) % n;
        const double *src = u.data() + static_cast<std::size_t>(j) * n;
        double *dst = data_.data() + (jj + kMaxReach) * stride_ + kMaxReach;
        std::memcpy(dst, src, sizeof(double) * n);
        for (int g = 1; g <= kMaxReach; ++g) {
            dst[-g] = src[n - g];
            dst[n - 1 + g] = src[g - 1];
        }
    }
}

namespace {

inline double pos(double t) { return t > 0.0 ? t : 0.0; }

struct HPairBase {
    double operator()(double, double lmin, double lmax, double lo, double hi) const {
        return lo * lmin + hi * lmax;
    }
};

struct PucciBase {
    double operator()(double tr, double lmin, double lmax, double lo, double hi) const {
        return lo * tr + (hi - lo) * (pos(lmin) + pos(lmax));
    }
};

struct PucciFBase {
    double operator()(double tr, double, double lmax, double lo, double hi) const {
        return lo * tr + (hi - lo) * pos(lmax);
    }
};

struct SmoothedBase {
    double k;
    double operator()(double tr, double lmin, double lmax, double lo, double hi) const {
        const std::array<double, 3> x{lmin, lmax, 0.0};
        return lo * tr + (hi - lo) * smooth_max(x, k);
    }
};

struct MongeAmpereBase {
    double operator()(double tr, double lmin, double lmax, double lo, double) const {
        return lo * (tr + pos(lmin) * pos(lmax));
    }
};

template <class Base>
void standard_loop(const CellOperator &op, const Sym2 &q, const PaddedField &pad,
                   std::span<double> out, Base base) {
    const int n = pad.n();
    const int st = pad.stride();
    const double h = op.grid().h();
    const double ih2 = 1.0 / (h * h);
    const double ih2q = 0.25 * ih2;
    const double *s = op.field.scale().values().data();
    const double *lo = op.field.lo().values().data();
    const double *hi = op.field.hi().values().data();
    for (int j = 0; j < n; ++j) {
        const double *c = pad.row(j);
        const double *up = c + st;
        const double *dn = c - st;
        const std::size_t base_k = static_cast<std::size_t>(j) * n;
        const double *sj = s + base_k;
        const double *loj = lo + base_k;
        const double *hij = hi + base_k;
        double *oj = out.data() + base_k;
        for (int i = 0; i < n; ++i) {
            const double m11 = q.a11 + (c[i + 1] - 2.0 * c[i] + c[i - 1]) * ih2;
            const double m22 = q.a22 + (up[i] - 2.0 * c[i] + dn[i]) * ih2;
            const double m12 = q.a12 + (up[i + 1] - dn[i + 1] - up[i - 1] + dn[i - 1]) * ih2q;
            const double mean = 0.5 * (m11 + m22);
            const double d = 0.5 * (m11 - m22);
            const double r = std::sqrt(d * d + m12 * m12);
            oj[i] = sj[i] * base(m11 + m22, mean - r, mean + r, loj[i], hij[i]);
        }
    }
}

void standard_linear(const CellOperator &op, const Sym2 &q, const PaddedField &pad,
                     std::span<double> out) {
    const int n = pad.n();
    const int st = pad.stride();
    const double h = op.grid().h();
    const double ih2 = 1.0 / (h * h);
    const Sym2 a = op.spec.linear_matrix;
    const double aq = frobenius(a, q);
    const double w11 = a.a11 * ih2, w22 = a.a22 * ih2, w12 = 2.0 * a.a12 * 0.25 * ih2;
    const double *s = op.field.scale().values().data();
    for (int j = 0; j < n; ++j) {
        const double *c = pad.row(j);
        const double *up = c + st;
        const double *dn = c - st;
        const std::size_t base_k = static_cast<std::size_t>(j) * n;
        for (int i = 0; i < n; ++i) {
            const double v = aq + w11 * (c[i + 1] - 2.0 * c[i] + c[i - 1]) +
                             w22 * (up[i] - 2.0 * c[i] + dn[i]) +
                             w12 * (up[i + 1] - dn[i + 1] - up[i - 1] + dn[i - 1]);
            out[base_k + i] = s[base_k + i] * v;
        }
    }
}

struct DirectionTable {
    static constexpr int kMax = 16;
    int count = 0;
    std::array<int, kMax> offset{};     // in padded storage
    std::array<double, kMax> qv{};      // v^T Q v / |v|^2
    std::array<double, kMax> inv{};     // 1 / (h^2 |v|^2)
    int ix = -1, iy = -1;

    DirectionTable(const SchemeSpec &scheme, const Sym2 &q, int stride, double h) {
        if (static_cast<int>(scheme.directions.size()) > kMax)
            throw ConfigError("too many stencil directions");
        for (const Offset p : scheme.directions) {
            offset[count] = p.dj * stride + p.di;
            qv[count] = q.quad(p.di, p.dj) / p.norm_sq();
            inv[count] = 1.0 / (h * h * p.norm_sq());
            if (p.dj == 0) ix = count;
            if (p.di == 0) iy = count;
            ++count;
        }
    }
};

template <class Base>
void monotone_loop(const CellOperator &op, const SchemeSpec &scheme, const Sym2 &q,
                   const PaddedField &pad, std::span<double> out, Base base) {
    const int n = pad.n();
    const DirectionTable t(scheme, q, pad.stride(), op.grid().h());
    const double *s = op.field.scale().values().data();
    const double *lo = op.field.lo().values().data();
    const double *hi = op.field.hi().values().data();
    for (int j = 0; j < n; ++j) {
        const double *c = pad.row(j);
        for (int i = 0; i < n; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * n + i;
            const double *ci = c + i;
            double lmin = 0.0, lmax = 0.0, tr = 0.0;
            for (int d = 0; d < t.count; ++d) {
                const double v = t.qv[d] + (ci[t.offset[d]] - 2.0 * ci[0] + ci[-t.offset[d]]) * t.inv[d];
                if (d == 0 || v < lmin) lmin = v;
                if (d == 0 || v > lmax) lmax = v;
                if (d == t.ix || d == t.iy) tr += v;
            }
            out[k] = s[k] * base(tr, lmin, lmax, lo[k], hi[k]);
        }
    }
}

void monotone_linear(const CellOperator &op, const SchemeSpec &scheme, const Sym2 &q,
                     const PaddedField &pad, std::span<double> out) {
    const auto weights = decompose_directional(op.spec.linear_matrix, scheme.directions);
    if (!weights) throw ConfigError("A0 is not representable on the monotone stencil");
    const int n = pad.n();
    const DirectionTable t(scheme, q, pad.stride(), op.grid().h());
    const double *s = op.field.scale().values().data();
    for (int j = 0; j < n; ++j) {
        const double *c = pad.row(j);
        for (int i = 0; i < n; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * n + i;
            const double *ci = c + i;
            double v = 0.0;
            for (int d = 0; d < t.count; ++d)
                v += (*weights)[d] *
                     (t.qv[d] + (ci[t.offset[d]] - 2.0 * ci[0] + ci[-t.offset[d]]) * t.inv[d]);
            out[k] = s[k] * v;
        }
    }
}

template <class Fn>
void with_base(const OperatorSpec &spec, Fn &&fn) {
    switch (spec.family) {
    case Family::HPair: fn(HPairBase{}); return;
    case Family::PucciStandard: fn(PucciBase{}); return;
    case Family::PucciF: fn(PucciFBase{}); return;
    case Family::PucciSmoothed: fn(SmoothedBase{spec.k}); return;
    case Family::MongeAmpereType: fn(MongeAmpereBase{}); return;
    case Family::Linear: break;
    }
}

void evaluate_standard(const CellOperator &op, const Sym2 &q, const PaddedField &pad,
                       std::span<double> out) {
    if (op.spec.family == Family::Linear) return standard_linear(op, q, pad, out);
    with_base(op.spec, [&](auto base) { standard_loop(op, q, pad, out, base); });
}

void evaluate_monotone(const CellOperator &op, const SchemeSpec &scheme, const Sym2 &q,
                       const PaddedField &pad, std::span<double> out) {
    if (op.spec.family == Family::Linear) return monotone_linear(op, scheme, q, pad, out);
    with_base(op.spec, [&](auto base) { monotone_loop(op, scheme, q, pad, out, base); });
}

}  // namespace

void evaluate(const CellOperator &op, const SchemeSpec &scheme, const Sym2 &q,
              const PaddedField &pad, std::span<double> out, Workspace &ws) {
    switch (scheme.kind) {
    case SchemeKind::Standard:
        evaluate_standard(op, q, pad, out);
        return;
    case SchemeKind::Monotone:
        evaluate_monotone(op, scheme, q, pad, out);
        return;
    case SchemeKind::Filtered: {
        ws.alt.resize(out.size());
        evaluate_standard(op, q, pad, out);
        evaluate_monotone(op, scheme, q, pad, ws.alt);
        for (std::size_t k = 0; k < out.size(); ++k) {
            const double mono = ws.alt[k];
            if (std::abs(out[k] - mono) > scheme.switch_tol * (1.0 + std::abs(mono))) out[k] = mono;
        }
        return;
    }
    }
}

}  // namespace phom::detail
