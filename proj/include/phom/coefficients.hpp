#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include "phom/grid.hpp"
#include "phom/operators.hpp"

namespace phom {

/// Generator used for every seeded pattern; written into run metadata.
inline constexpr std::string_view kRngAlgorithm = "mt19937_64";

enum class PatternKind { Constant, PeriodicCheckerboard, Stripes, RandomCheckerboard, SmoothCosine, UniformRandom };

enum class StripeOrientation { Horizontal, Vertical };

std::string_view pattern_name(PatternKind k);
PatternKind parse_pattern(std::string_view name);

/// Two-valued patterns take value_b on black cells and value_w on white ones
/// (1 and r for the classic a0 coefficient).
struct PatternSpec {
    PatternKind kind = PatternKind::Constant;
    int cells_per_side = 20;
    double value_b = 1.0;
    double value_w = 2.0;
    StripeOrientation orientation = StripeOrientation::Vertical;
    double p = 0.5;             // RandomCheckerboard: probability of a white cell
    std::uint64_t seed = 0;     // RandomCheckerboard, UniformRandom
    double mean = 2.5;          // SmoothCosine
    double amplitude = 0.5;     // SmoothCosine
    double lo = 1.0;            // UniformRandom
    double hi = 2.0;            // UniformRandom
    double constant = 1.0;      // Constant

    static PatternSpec constant_value(double v) {
        PatternSpec s;
        s.constant = v;
        return s;
    }
    static PatternSpec checkerboard(double b, double w, int cells = 20) {
        PatternSpec s;
        s.kind = PatternKind::PeriodicCheckerboard;
        s.value_b = b;
        s.value_w = w;
        s.cells_per_side = cells;
        return s;
    }
    static PatternSpec stripes(double b, double w, StripeOrientation o, int cells = 20) {
        PatternSpec s = checkerboard(b, w, cells);
        s.kind = PatternKind::Stripes;
        s.orientation = o;
        return s;
    }
    static PatternSpec random_checkerboard(double b, double w, double p, std::uint64_t seed,
                                           int cells = 20) {
        PatternSpec s = checkerboard(b, w, cells);
        s.kind = PatternKind::RandomCheckerboard;
        s.p = p;
        s.seed = seed;
        return s;
    }
    static PatternSpec smooth_cosine(double mean, double amplitude) {
        PatternSpec s;
        s.kind = PatternKind::SmoothCosine;
        s.mean = mean;
        s.amplitude = amplitude;
        return s;
    }
    static PatternSpec uniform_random(double lo, double hi, std::uint64_t seed, int cells = 20) {
        PatternSpec s;
        s.kind = PatternKind::UniformRandom;
        s.lo = lo;
        s.hi = hi;
        s.seed = seed;
        s.cells_per_side = cells;
        return s;
    }

    bool cell_based() const;
};

/// Samples the pattern onto the grid. Cell-based patterns require n to be a
/// multiple of cells_per_side (ConfigError otherwise).
GridFunction sample(const PatternSpec &pattern, TorusGrid grid);

/// (mean of 1/f)^-1. DomainError on a nonpositive value.
double harmonic_mean(const GridFunction &f);

/// Writes "x,y,value" rows.
void write_csv(std::ostream &os, const GridFunction &f);

/// Per-point operator coefficients: the multiplier s(y) and the pair
/// (lo(y), hi(y)); see PointCoeffs.
class CoefficientField {
public:
    CoefficientField() = default;
    CoefficientField(GridFunction scale, GridFunction lo, GridFunction hi);

    /// Constant-coefficient medium.
    static CoefficientField uniform(TorusGrid grid, double scale, double lo, double hi);
    /// a0(y) F0(Q): pattern multiplier with constant (lo, hi).
    static CoefficientField separable(GridFunction a0, double lo, double hi);
    /// Unit multiplier with spatially varying pair.
    static CoefficientField pair(GridFunction lo, GridFunction hi);

    const TorusGrid &grid() const { return scale_.grid(); }
    PointCoeffs at(std::size_t k) const { return {scale_[k], lo_[k], hi_[k]}; }

    const GridFunction &scale() const { return scale_; }
    const GridFunction &lo() const { return lo_; }
    const GridFunction &hi() const { return hi_; }

    /// lo and hi are spatially constant, so F = s(y) F0(Q).
    bool separable() const;

    /// Throws ConfigError naming the first point that is not uniformly elliptic.
    void validate(const OperatorSpec &spec, double delta = 1e-6) const;

    CoefficientField shifted(int di, int dj) const;

private:
    GridFunction scale_;
    GridFunction lo_;
    GridFunction hi_;
};

/// Operator family together with its coefficients, validated on construction.
struct CellOperator {
    CellOperator(OperatorSpec spec, CoefficientField field, double delta = 1e-6);

    OperatorSpec spec;
    CoefficientField field;

    const TorusGrid &grid() const { return field.grid(); }
    double eval_at(std::size_t k, const Sym2 &q) const { return eval(spec, q, field.at(k)); }
    /// Largest ellipticity_bound over the grid.
    double ellipticity_max(const Sym2 &q) const;
};

}  // namespace phom
