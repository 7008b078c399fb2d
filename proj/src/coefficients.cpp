#include "phom/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "phom/errors.hpp"

namespace phom {

namespace {

// Uniform double in [0, 1) from the top 53 bits; portable unlike std distributions.
double unit_draw(std::mt19937_64 &gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

bool all_equal(const GridFunction &f) {
    const auto v = f.values();
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; });
}

}  // namespace

std::string_view pattern_name(PatternKind k) {
    switch (k) {
    case PatternKind::Constant: return "constant";
    case PatternKind::PeriodicCheckerboard: return "checkerboard";
    case PatternKind::Stripes: return "stripes";
    case PatternKind::RandomCheckerboard: return "random_checkerboard";
    case PatternKind::SmoothCosine: return "smooth_cosine";
    case PatternKind::UniformRandom: return "uniform_random";
    }
    return "?";
}

PatternKind parse_pattern(std::string_view name) {
    for (PatternKind k : {PatternKind::Constant, PatternKind::PeriodicCheckerboard, PatternKind::Stripes,
                          PatternKind::RandomCheckerboard, PatternKind::SmoothCosine,
                          PatternKind::UniformRandom})
        if (pattern_name(k) == name) return k;
    throw ConfigError("unknown pattern '" + std::string(name) + "'");
}

bool PatternSpec::cell_based() const {
    return kind == PatternKind::PeriodicCheckerboard || kind == PatternKind::Stripes ||
           kind == PatternKind::RandomCheckerboard || kind == PatternKind::UniformRandom;
}

GridFunction sample(const PatternSpec &pattern, TorusGrid grid) {
    const int n = grid.n();
    if (pattern.kind == PatternKind::Constant) return GridFunction(grid, pattern.constant);
    if (pattern.kind == PatternKind::SmoothCosine) {
        return GridFunction::sample(grid, [&](double x, double y) {
            return pattern.mean + pattern.amplitude * std::cos(2.0 * std::numbers::pi * x) *
                                      std::cos(2.0 * std::numbers::pi * y);
        });
    }

    const int cells = pattern.cells_per_side;
    if (cells <= 0 || n % cells != 0) {
        std::ostringstream msg;
        msg << "grid n = " << n << " is not divisible by cells_per_side = " << cells;
        throw ConfigError(msg.str());
    }
    const int side = n / cells;

    // Cell values in row-major cell order (cj outer).
    std::vector<double> cell_value(static_cast<std::size_t>(cells) * cells);
    std::mt19937_64 gen(pattern.seed);
    for (int cj = 0; cj < cells; ++cj) {
        for (int ci = 0; ci < cells; ++ci) {
            double v = pattern.value_b;
            switch (pattern.kind) {
            case PatternKind::PeriodicCheckerboard:
                v = (ci + cj) % 2 == 0 ? pattern.value_b : pattern.value_w;
                break;
            case PatternKind::Stripes: {
                const int c = pattern.orientation == StripeOrientation::Vertical ? ci : cj;
                v = c % 2 == 0 ? pattern.value_b : pattern.value_w;
                break;
            }
            case PatternKind::RandomCheckerboard:
                v = unit_draw(gen) < pattern.p ? pattern.value_w : pattern.value_b;
                break;
            case PatternKind::UniformRandom:
                v = pattern.lo + (pattern.hi - pattern.lo) * unit_draw(gen);
                break;
            default:
                break;
            }
            cell_value[static_cast<std::size_t>(cj) * cells + ci] = v;
        }
    }

    GridFunction f(grid);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            f.at(i, j) = cell_value[static_cast<std::size_t>(j / side) * cells + i / side];
    return f;
}

double harmonic_mean(const GridFunction &f) {
    double s = 0.0;
    for (double v : f.values()) {
        if (!(v > 0.0)) throw DomainError("harmonic_mean: field must be strictly positive");
        s += 1.0 / v;
    }
    return static_cast<double>(f.size()) / s;
}

void write_csv(std::ostream &os, const GridFunction &f) {
    const TorusGrid &g = f.grid();
    os << "x,y,value\n";
    os.precision(17);
    for (int j = 0; j < g.n(); ++j)
        for (int i = 0; i < g.n(); ++i) os << g.x(i) << ',' << g.y(j) << ',' << f.at(i, j) << '\n';
}

CoefficientField::CoefficientField(GridFunction scale, GridFunction lo, GridFunction hi)
    : scale_(std::move(scale)), lo_(std::move(lo)), hi_(std::move(hi)) {
    if (!(scale_.grid() == lo_.grid()) || !(scale_.grid() == hi_.grid()))
        throw ConfigError("coefficient fields live on different grids");
}

CoefficientField CoefficientField::uniform(TorusGrid grid, double scale, double lo, double hi) {
    return {GridFunction(grid, scale), GridFunction(grid, lo), GridFunction(grid, hi)};
}

CoefficientField CoefficientField::separable(GridFunction a0, double lo, double hi) {
    const TorusGrid g = a0.grid();
    return {std::move(a0), GridFunction(g, lo), GridFunction(g, hi)};
}

CoefficientField CoefficientField::pair(GridFunction lo, GridFunction hi) {
    const TorusGrid g = lo.grid();
    return {GridFunction(g, 1.0), std::move(lo), std::move(hi)};
}

bool CoefficientField::separable() const { return all_equal(lo_) && all_equal(hi_); }

void CoefficientField::validate(const OperatorSpec &spec, double delta) const {
    const TorusGrid &g = grid();
    for (int j = 0; j < g.n(); ++j) {
        for (int i = 0; i < g.n(); ++i) {
            const std::string why = check_ellipticity(spec, at(g.index(i, j)), delta);
            if (!why.empty()) {
                std::ostringstream msg;
                msg << "operator not uniformly elliptic at grid point (" << i << ", " << j
                    << "): " << why;
                throw ConfigError(msg.str());
            }
        }
    }
}

CoefficientField CoefficientField::shifted(int di, int dj) const {
    return {scale_.shifted(di, dj), lo_.shifted(di, dj), hi_.shifted(di, dj)};
}

CellOperator::CellOperator(OperatorSpec spec_, CoefficientField field_, double delta)
    : spec(spec_), field(std::move(field_)) {
    spec.validate();
    field.validate(spec, delta);
}

double CellOperator::ellipticity_max(const Sym2 &q) const {
    double m = 0.0;
    for (std::size_t k = 0; k < field.grid().size(); ++k)
        m = std::max(m, ellipticity_bound(spec, field.at(k), q));
    return m;
}

}  // namespace phom
