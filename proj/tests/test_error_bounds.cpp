#include <cmath>

#include "doctest.h"
#include "phom/error_bounds.hpp"

using namespace phom;

namespace {

CellOperator separable_pucci_f(int n = 20, int cells = 4) {
    const TorusGrid g(n);
    return CellOperator(OperatorSpec::pucci_f(),
                        CoefficientField::separable(sample(PatternSpec::checkerboard(1.0, 2.0, cells), g), 1.0, 3.0));
}

HomogenizationRecord synthetic(double error, SemiConcavityValue lo, SemiConcavityValue hi) {
    HomogenizationRecord r;
    r.error = error;
    r.c_bar_minus = lo;
    r.c_bar_plus = hi;
    return r;
}

}  // namespace

TEST_CASE("constant medium has zero error and holds") {
    const CellOperator op(OperatorSpec::pucci_f(), CoefficientField::uniform(TorusGrid(12), 1.0, 1.0, 3.0));
    const HomogenizationRecord r = homogenize(op, Sym2::diag(2.0, -1.0), PipelineParams{});
    CHECK(r.converged());
    CHECK(std::abs(r.error) <= 1e-12);
    CHECK(r.c_bar_plus.value() == 0.0);
    CHECK(r.c_bar_minus.value() == 0.0);
    CHECK(r.verdict == Verdict::Holds);
}

TEST_CASE("convex families have zero lower bound and nonnegative error") {
    const CellOperator op = separable_pucci_f();
    for (const Sym2 &q : {Sym2::diag(2.0, 1.0), Sym2::diag(1.0, -0.5), Sym2::diag(-0.5, 2.0)}) {
        const HomogenizationRecord r = homogenize(op, q, PipelineParams{});
        REQUIRE(r.converged());
        CHECK(r.c_bar_minus.finite());
        CHECK(r.c_bar_minus.value() == 0.0);
        CHECK(r.error >= -1e-7);
    }
}

TEST_CASE("finite upper bound dominates the error") {
    const CellOperator op = separable_pucci_f();
    const HomogenizationRecord r = homogenize(op, Sym2::diag(2.0, 1.0), PipelineParams{});
    REQUIRE(r.converged());
    REQUIRE(r.c_bar_plus.finite());
    CHECK(r.c_bar_plus.value() >= r.error);
    CHECK(r.verdict != Verdict::Violated);
    // The separable formula uses the same ingredients.
    PipelineDetail d;
    homogenize(op, Sym2::diag(2.0, 1.0), PipelineParams{}, 0, &d);
    const auto [lower, upper] = corollary_sep_bound(op, Sym2::diag(2.0, 1.0), d.cell);
    CHECK(std::abs(upper.value() - r.c_bar_plus.value()) <= 1e-8);
    CHECK(std::abs(lower.value() - r.c_bar_minus.value()) <= 1e-8);
}

TEST_CASE("error scales linearly with Q") {
    const CellOperator op = separable_pucci_f();
    const Sym2 q = Sym2::diag(1.0, -0.5);
    const double e1 = homogenize(op, q, PipelineParams{}).error;
    const double e2 = homogenize(op, q * 2.0, PipelineParams{}).error;
    CHECK(std::abs(e2 - 2.0 * e1) <= 1e-6);
}

TEST_CASE("upper bound scales linearly along rays") {
    // C+ scales like 1/|Q| and |D^2u|^2 like |Q|^2, so c_bar scales like t.
    const CellOperator op = separable_pucci_f();
    const Sym2 q = Sym2::diag(2.0, 1.0);
    const double c1 = homogenize(op, q, PipelineParams{}).c_bar_plus.value();
    const double c3 = homogenize(op, q * 3.0, PipelineParams{}).c_bar_plus.value();
    CHECK(c3 == doctest::Approx(3.0 * c1).epsilon(1e-5));
}

TEST_CASE("unbounded constant with support makes c_bar unbounded") {
    // Smoothed family: C+ is unbounded wherever the corrector is nonzero.
    const TorusGrid g(20);
    const CellOperator op(OperatorSpec::smoothed(1.0),
                          CoefficientField::separable(sample(PatternSpec::checkerboard(1.0, 2.0, 4), g), 1.0, 3.0));
    const HomogenizationRecord r = homogenize(op, Sym2::diag(2.0, -1.0), PipelineParams{});
    REQUIRE(r.converged());
    CHECK(r.c_bar_plus.is_unbounded());
    CHECK(r.verdict == Verdict::Holds);
}

TEST_CASE("verdict logic") {
    const SemiConcavityValue inf = SemiConcavityValue::unbounded();
    using V = SemiConcavityValue;
    CHECK(check_bounds(synthetic(0.5, V(0.0), V(1.0)), 0.0) == Verdict::Holds);
    CHECK(check_bounds(synthetic(1.05, V(0.0), V(1.0)), 0.1) == Verdict::HoldsWithinSlack);
    CHECK(check_bounds(synthetic(1.5, V(0.0), V(1.0)), 0.1) == Verdict::Violated);
    CHECK(check_bounds(synthetic(-0.05, V(0.0), V(1.0)), 0.1) == Verdict::HoldsWithinSlack);
    CHECK(check_bounds(synthetic(-0.5, V(0.0), V(1.0)), 0.1) == Verdict::Violated);
    CHECK(check_bounds(synthetic(1e6, V(0.0), inf), 0.0) == Verdict::Holds);
    CHECK(check_bounds(synthetic(-1e6, inf, V(1.0)), 0.0) == Verdict::Holds);
    HomogenizationRecord failed = synthetic(5.0, V(0.0), V(1.0));
    failed.status = RecordStatus::SolverFailed;
    CHECK(check_bounds(failed, 0.0) == Verdict::NotChecked);
}

TEST_CASE("slack policy") {
    SlackPolicy p;
    CHECK(p.delta(1e-8) == doctest::Approx(1e-7));
    p.refinement_estimate = 0.01;
    CHECK(p.delta(1e-8) == doctest::Approx(0.01 + 1e-7));
}

TEST_CASE("analytic and numerical measure modes agree on separable media") {
    const CellOperator op = separable_pucci_f(16, 4);
    PipelineParams numerical;
    numerical.measure_mode = MeasureMode::Numerical;
    const Sym2 q = Sym2::diag(1.0, -0.5);
    const HomogenizationRecord a = homogenize(op, q, PipelineParams{});
    const HomogenizationRecord n = homogenize(op, q, numerical);
    CHECK(a.measure_iterations == 0);
    CHECK(n.measure_iterations > 0);
    CHECK(std::abs(a.l_bar - n.l_bar) <= 1e-8);
    CHECK(parse_measure_mode(measure_mode_name(MeasureMode::Numerical)) == MeasureMode::Numerical);
    CHECK_THROWS_AS(parse_measure_mode("guess"), ConfigError);
}

TEST_CASE("pipeline failures are recorded, not thrown") {
    const CellOperator op = separable_pucci_f();
    PipelineParams p;
    p.solver.max_iter = 3;
    const HomogenizationRecord r = homogenize(op, Sym2::diag(2.0, 1.0), p, 7);
    CHECK(r.status == RecordStatus::SolverFailed);
    CHECK(r.verdict == Verdict::NotChecked);
    CHECK(r.seed == 7);
    CHECK_FALSE(r.message.empty());

    const Sym2 a0 = rotate(Sym2::diag(1.0, 20.0), 0.5);
    const TorusGrid g(8);
    const CellOperator lin(OperatorSpec::linear(a0),
                           CoefficientField::separable(sample(PatternSpec::checkerboard(1.0, 2.0, 2), g), 1.0, 1.0));
    PipelineParams strict;
    strict.measure_mode = MeasureMode::Numerical;
    strict.measure.allow_widen = false;
    CHECK(homogenize(lin, Sym2::identity(), strict).status == RecordStatus::StencilFailed);
}
