#include "phom/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "phom/sweep.hpp"

namespace phom {

namespace {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
    Sym2 sym(double scale) { return {uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale)}; }

private:
    std::mt19937_64 gen_;
};

std::string fmt_sci(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

// Q whose eigenvalues stay away from zero and from each other, where every
// family is smooth.
Sym2 regular_q(Rng &rng, double margin) {
    for (;;) {
        const Sym2 q = rng.sym(3.0);
        double lmin, lmax;
        eigenvalues(q.a11, q.a12, q.a22, lmin, lmax);
        if (lmax - lmin > margin && std::abs(lmin) > margin && std::abs(lmax) > margin) return q;
    }
}

struct Sample {
    OperatorSpec spec;
    PointCoeffs c;
};

Sample random_operator(Family f, Rng &rng) {
    Sample s;
    s.spec.family = f;
    s.c.scale = rng.uniform(0.5, 2.0);
    s.c.lo = rng.uniform(0.5, 2.0);
    s.c.hi = s.c.lo + rng.uniform(0.0, 3.0);
    if (f == Family::HPair && rng.unit() < 0.5) std::swap(s.c.lo, s.c.hi);
    if (f == Family::PucciSmoothed) {
        const double ks[] = {0.1, 1.0, 10.0};
        s.spec.k = ks[static_cast<int>(rng.unit() * 3.0)];
        s.c.hi = s.c.lo + rng.uniform(0.0, 3.0 * s.c.lo);
    }
    if (f == Family::Linear) {
        const double t = rng.uniform(0.0, std::numbers::pi);
        s.spec.linear_matrix = rotate(Sym2::diag(rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)), t);
    }
    return s;
}

constexpr Family kAllFamilies[] = {Family::Linear, Family::HPair, Family::PucciStandard,
                                   Family::PucciF, Family::PucciSmoothed, Family::MongeAmpereType};

CellOperator checkerboard_operator(OperatorSpec spec, int n, double lo, double hi, int cells = 20) {
    const TorusGrid g(n);
    return CellOperator(spec, CoefficientField::separable(sample(PatternSpec::checkerboard(1.0, 2.0, cells), g), lo, hi));
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-12); }

}  // namespace

SuiteResult validate_eigen_reconstruction(std::uint64_t seed, int samples, double tol) {
    Rng rng(seed);
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        Sym2 q = rng.sym(10.0);
        if (s % 10 == 0) q = Sym2::diag(q.a11, q.a11 + 1e-9 * rng.unit());  // near-repeated
        const EigenFrame e = eigen_decompose(q);
        worst = std::max(worst, (e.reconstruct() - q).norm() / (1.0 + q.norm()));
    }
    return {"eigen_reconstruction", worst <= tol, "max relative error " + fmt_sci(worst) + " over " + std::to_string(samples)};
}

SuiteResult validate_gradient(std::uint64_t seed, int samples, double tol) {
    Rng rng(seed);
    const double eps = 1e-6;
    const Sym2 basis[] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    double worst = 0.0;
    std::string where;
    for (Family f : kAllFamilies) {
        for (int s = 0; s < samples; ++s) {
            const Sample op = random_operator(f, rng);
            const Sym2 q = regular_q(rng, 1e-2);
            const Sym2 g = grad_Q(op.spec, q, op.c);
            for (const Sym2 &e : basis) {
                const double fd = (eval(op.spec, q + e * eps, op.c) - eval(op.spec, q - e * eps, op.c)) / (2.0 * eps);
                const double err = std::abs(fd - frobenius(g, e));
                if (err > worst) {
                    worst = err;
                    where = std::string(family_name(f));
                }
            }
        }
    }
    return {"gradient_vs_finite_difference", worst <= tol,
            "max abs error " + fmt_sci(worst) + (where.empty() ? "" : " (" + where + ")")};
}

SuiteResult validate_quadratic_domination(std::uint64_t seed, int samples) {
    Rng rng(seed);
    int checked = 0, failures = 0;
    std::string first;
    for (Family f : kAllFamilies) {
        for (int s = 0; s < samples; ++s) {
            const Sample op = random_operator(f, rng);
            const Sym2 q = regular_q(rng, 1e-3);
            const Sym2 dir = rng.sym(1.0);
            const double t = std::pow(10.0, rng.uniform(-3.0, 1.0)) / std::max(dir.norm(), 1e-12);
            const Sym2 m = q + dir * t;
            const double gap = eval(op.spec, m, op.c) - linearized_eval(op.spec, q, m, op.c);
            const double half = 0.5 * (m - q).norm() * (m - q).norm();
            const double slack = 1e-9 * (1.0 + std::abs(eval(op.spec, m, op.c)));
            const SemiConcavityValue cp = c_plus(op.spec, q, op.c);
            const SemiConcavityValue cm = c_minus(op.spec, q, op.c);
            bool bad = false;
            if (cp.finite()) {
                ++checked;
                bad |= gap > cp.value() * half + slack;
            }
            if (cm.finite()) {
                ++checked;
                bad |= gap < cm.value() * half - slack;
            }
            if (bad) {
                ++failures;
                if (first.empty()) first = " first in " + std::string(family_name(f));
            }
        }
    }
    return {"quadratic_domination", failures == 0,
            std::to_string(failures) + " failures in " + std::to_string(checked) + " finite checks" + first};
}

SuiteResult validate_homogeneity(int grid_n, double tol) {
    const OperatorSpec specs[] = {OperatorSpec::h_pair(), OperatorSpec::pucci(), OperatorSpec::pucci_f()};
    const Sym2 qs[] = {Sym2::diag(1.0, 2.0), Sym2::diag(1.0, -0.5)};
    double worst = 0.0;
    for (const OperatorSpec &spec : specs) {
        const CellOperator op = checkerboard_operator(spec, grid_n, 1.0, 3.0);
        for (const Sym2 &q : qs) {
            const double base = solve_cell(op, SchemeSpec::standard(), q).f_bar;
            for (double t : {0.5, 2.0}) {
                const double scaled = solve_cell(op, SchemeSpec::standard(), q * t).f_bar;
                worst = std::max(worst, rel_diff(scaled, t * base));
            }
        }
    }
    return {"homogeneity_f_bar", worst <= tol, "max relative deviation " + fmt_sci(worst)};
}

SuiteResult validate_isotropy(std::uint64_t seed, int grid_n, double tol) {
    Rng rng(seed);
    const OperatorSpec specs[] = {OperatorSpec::h_pair(), OperatorSpec::pucci(), OperatorSpec::pucci_f()};
    const Sym2 qs[] = {Sym2::diag(1.0, 2.0), Sym2::diag(1.0, -0.5)};
    const double angles[] = {std::numbers::pi / 2.0, rng.uniform(0.0, std::numbers::pi),
                             rng.uniform(0.0, std::numbers::pi)};
    double worst = 0.0;
    std::string where;
    for (const OperatorSpec &spec : specs) {
        const CellOperator op = checkerboard_operator(spec, grid_n, 1.0, 3.0);
        for (const Sym2 &q : qs) {
            const double base = solve_cell(op, SchemeSpec::standard(), q).f_bar;
            for (double theta : angles) {
                const double rotated = solve_cell(op, SchemeSpec::standard(), rotate(q, theta)).f_bar;
                const double d = rel_diff(rotated, base);
                if (d > worst) {
                    worst = d;
                    std::ostringstream os;
                    os << family_name(spec.family) << ", theta " << theta;
                    where = os.str();
                }
            }
        }
    }
    return {"isotropy_f_bar", worst <= tol, "max relative deviation " + fmt_sci(worst) + " (" + where + ")"};
}

SuiteResult validate_determinism(std::uint64_t seed) {
    ExperimentConfig c;
    c.op = OperatorSpec::pucci_f();
    c.lo = PatternSpec::constant_value(1.0);
    c.hi = PatternSpec::random_checkerboard(1.0, 3.0, 0.5, 0, 8);
    c.grid_n = 24;
    c.seed = seed;
    c.q.mode = QMode::List;
    c.q.list = {Sym2::diag(1.0, -1.0), Sym2::diag(-1.0, -2.0), Sym2::diag(2.0, 0.5)};

    const std::string first = records_to_csv(run_sweep(c));
    const std::string second = records_to_csv(run_sweep(c));
    c.jobs = 2;
    const std::string threaded = records_to_csv(run_sweep(c));
    const bool ok = first == second && first == threaded;
    return {"determinism", ok, ok ? "repeat and two-worker CSV identical" : "CSV bytes differ between runs"};
}

SuiteResult validate_comparison_principle(std::uint64_t seed, int pairs) {
    // One explicit step u + dt F(Q + D^2 u), before the mean is subtracted.
    Rng rng(seed);
    const int n = 24;
    const TorusGrid g(n);
    const double h2 = g.h() * g.h();
    const OperatorSpec specs[] = {OperatorSpec::linear(), OperatorSpec::h_pair(), OperatorSpec::pucci(),
                                  OperatorSpec::pucci_f(), OperatorSpec::monge_ampere()};
    const SchemeSpec scheme = SchemeSpec::monotone();
    double worst = 0.0;
    for (const OperatorSpec &spec : specs) {
        const CellOperator op = checkerboard_operator(spec, n, 1.0, 3.0, 4);
        for (int p = 0; p < pairs; ++p) {
            const Sym2 q = rng.sym(1.0);
            GridFunction u(g), v(g);
            for (std::size_t k = 0; k < g.size(); ++k) {
                u[k] = rng.uniform(-0.1, 0.1) * h2;
                v[k] = u[k] + (rng.unit() < 0.3 ? rng.uniform(0.0, 0.1) * h2 : 0.0);
            }
            const double dt = cfl_time_step(op, q);
            const GridFunction fu = discrete_F(op, scheme, q, u);
            const GridFunction fv = discrete_F(op, scheme, q, v);
            for (std::size_t k = 0; k < g.size(); ++k) {
                const double diff = (v[k] + dt * fv[k]) - (u[k] + dt * fu[k]);
                worst = std::max(worst, -diff / h2);
            }
        }
    }
    return {"comparison_principle", worst <= 1e-12, "max order violation " + fmt_sci(std::max(worst, 0.0)) + " (units of h^2)"};
}

std::vector<SuiteResult> run_validation(const ValidationOptions &o) {
    return {validate_eigen_reconstruction(o.seed),
            validate_gradient(o.seed + 1),
            validate_quadratic_domination(o.seed + 2),
            validate_homogeneity(o.grid_n),
            validate_isotropy(o.seed + 3, o.grid_n),
            validate_determinism(o.seed + 4),
            validate_comparison_principle(o.seed + 5)};
}

}  // namespace phom
