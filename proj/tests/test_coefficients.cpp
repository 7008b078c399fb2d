#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "phom/coefficients.hpp"
#include "phom/errors.hpp"

using namespace phom;

TEST_CASE("periodic checkerboard layout") {
    const TorusGrid g(8);
    const GridFunction f = sample(PatternSpec::checkerboard(1.0, 5.0, 4), g);
    // Cells are 2x2 points; cell (0, 0) is black.
    CHECK(f.at(0, 0) == 1.0);
    CHECK(f.at(1, 1) == 1.0);
    CHECK(f.at(2, 0) == 5.0);
    CHECK(f.at(0, 2) == 5.0);
    CHECK(f.at(2, 2) == 1.0);
    CHECK(f.at(7, 7) == 1.0);
    double sum = 0.0;
    for (double v : f.values()) sum += v;
    CHECK(sum / f.size() == doctest::Approx(3.0));
}

TEST_CASE("stripes follow the orientation") {
    const TorusGrid g(4);
    const GridFunction v = sample(PatternSpec::stripes(1.0, 2.0, StripeOrientation::Vertical, 4), g);
    const GridFunction h = sample(PatternSpec::stripes(1.0, 2.0, StripeOrientation::Horizontal, 4), g);
    for (int j = 0; j < 4; ++j) {
        for (int i = 0; i < 4; ++i) {
            CHECK(v.at(i, j) == (i % 2 == 0 ? 1.0 : 2.0));
            CHECK(h.at(i, j) == (j % 2 == 0 ? 1.0 : 2.0));
        }
    }
}

TEST_CASE("cell patterns need n divisible by the cell count") {
    CHECK_THROWS_AS(sample(PatternSpec::checkerboard(1.0, 2.0, 20), TorusGrid(30)), ConfigError);
    CHECK_NOTHROW(sample(PatternSpec::checkerboard(1.0, 2.0, 20), TorusGrid(40)));
    CHECK_NOTHROW(sample(PatternSpec::smooth_cosine(2.0, 0.5), TorusGrid(30)));
}

TEST_CASE("random checkerboard is seeded and two-valued") {
    const TorusGrid g(200);
    const auto p = PatternSpec::random_checkerboard(1.0, 4.0, 0.3, 99, 100);
    const GridFunction a = sample(p, g);
    CHECK(a == sample(p, g));
    auto other = p;
    other.seed = 100;
    CHECK_FALSE(a == sample(other, g));

    int white = 0;
    for (int cj = 0; cj < 100; ++cj) {
        for (int ci = 0; ci < 100; ++ci) {
            const double v = a.at(2 * ci, 2 * cj);
            CHECK((v == 1.0 || v == 4.0));
            CHECK(a.at(2 * ci + 1, 2 * cj + 1) == v);
            white += v == 4.0;
        }
    }
    // 10^4 Bernoulli(0.3) draws: five standard deviations is about 0.023.
    CHECK(std::abs(white / 1e4 - 0.3) < 0.023);
}

TEST_CASE("uniform random cells stay in range") {
    const GridFunction f = sample(PatternSpec::uniform_random(2.0, 3.0, 4, 10), TorusGrid(20));
    CHECK(f.min() >= 2.0);
    CHECK(f.max() <= 3.0);
    CHECK(f.max() > f.min());
}

TEST_CASE("smooth cosine values") {
    const TorusGrid g(8);
    const GridFunction f = sample(PatternSpec::smooth_cosine(2.5, 0.5), g);
    CHECK(f.at(0, 0) == doctest::Approx(3.0));
    CHECK(f.at(4, 0) == doctest::Approx(2.0));
    CHECK(f.at(2, 0) == doctest::Approx(2.5));
    CHECK(f.at(4, 4) == doctest::Approx(3.0));
    CHECK(f.mean() == doctest::Approx(2.5));
}

TEST_CASE("harmonic mean") {
    const TorusGrid g(2);
    CHECK(harmonic_mean(GridFunction(g, std::vector<double>{1.0, 2.0, 2.0, 1.0})) == doctest::Approx(4.0 / 3.0));
    CHECK(harmonic_mean(GridFunction(g, 3.0)) == doctest::Approx(3.0));
    CHECK_THROWS_AS(harmonic_mean(GridFunction(g, std::vector<double>{1.0, 0.0, 2.0, 1.0})), DomainError);
    // Strictly below the arithmetic mean for a nonconstant field.
    const GridFunction c = sample(PatternSpec::smooth_cosine(2.5, 0.5), TorusGrid(64));
    CHECK(harmonic_mean(c) < 2.5);
    CHECK(harmonic_mean(c) > 2.0);
}

TEST_CASE("coefficient field validation names the offending point") {
    const TorusGrid g(4);
    GridFunction lo(g, 1.0), hi(g, 2.0);
    hi.at(2, 3) = 0.5;
    const CoefficientField field = CoefficientField::pair(lo, hi);
    try {
        field.validate(OperatorSpec::pucci());
        FAIL("expected ConfigError");
    } catch (const ConfigError &e) {
        CHECK(std::string(e.what()).find("(2, 3)") != std::string::npos);
    }
    // HPair takes any positive pair.
    CHECK_NOTHROW(field.validate(OperatorSpec::h_pair()));
    CHECK_THROWS_AS(CellOperator(OperatorSpec::pucci_f(), field), ConfigError);
    CHECK_THROWS_AS(CellOperator(OperatorSpec::pucci(), CoefficientField::uniform(g, 0.0, 1.0, 2.0)), ConfigError);
}

TEST_CASE("separability and shifts") {
    const TorusGrid g(4);
    const auto a0 = sample(PatternSpec::checkerboard(1.0, 2.0, 2), g);
    const CoefficientField sep = CoefficientField::separable(a0, 1.0, 3.0);
    CHECK(sep.separable());
    CHECK(sep.at(g.index(2, 0)).scale == 2.0);
    CHECK_FALSE(CoefficientField::pair(GridFunction(g, 1.0), a0).separable());
    CHECK(sep.shifted(2, 0).at(g.index(2, 0)).scale == 1.0);
    CHECK_THROWS_AS(CoefficientField(GridFunction(g), GridFunction(TorusGrid(5)), GridFunction(g)), ConfigError);
}

TEST_CASE("grid function CSV") {
    std::ostringstream os;
    write_csv(os, GridFunction(TorusGrid(2), std::vector<double>{1.0, 2.0, 3.0, 4.0}));
    CHECK(os.str() == "x,y,value\n0,0,1\n0.5,0,2\n0,0.5,3\n0.5,0.5,4\n");
}

TEST_CASE("pattern names round-trip") {
    for (PatternKind k : {PatternKind::Constant, PatternKind::PeriodicCheckerboard, PatternKind::Stripes,
                          PatternKind::RandomCheckerboard, PatternKind::SmoothCosine, PatternKind::UniformRandom})
        CHECK(parse_pattern(pattern_name(k)) == k);
    CHECK_THROWS_AS(parse_pattern("plaid"), ConfigError);
}
