#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "eigbranch/builtins.hpp"
#include "eigbranch/continuation.hpp"

using namespace eigbranch;
using std::numbers::pi;

namespace {

Vector unit(Vector v) {
    const double n = norm2(v);
    for (auto& e : v) e /= n;
    return v;
}

double abs_cos(std::span<const double> a, std::span<const double> b) {
    return std::abs(dot(a, b)) / (norm2(a) * norm2(b));
}

void check_invariants(const Problem& p, const Branch& b, const ContinuationSettings& cfg) {
    for (std::size_t k = 0; k < b.points.size(); ++k) {
        const SolutionPoint& s = b.points[k];
        const Vector r = augmented_residual(p, s);
        const Vector ph(r.begin(), r.end() - 1);
        CHECK(p.gram_h().norm(ph) <= cfg.newton_tol);
        CHECK(std::abs(p.gram_g().norm(s.x) * p.gram_g().norm(s.x) - 1.0) <= 10 * cfg.newton_tol);
        CHECK(norm2(jacobian(p, s) * b.tangents[k]) <= 100 * cfg.newton_tol);
        CHECK(norm2(b.tangents[k]) == doctest::Approx(1.0).epsilon(1e-12));
        if (k > 0) CHECK(dot(b.tangents[k - 1], b.tangents[k]) > 0.0);
    }
}

}  // namespace

TEST_CASE("initial tangent at simple trivial solutions follows the closed forms") {
    const Problem p41 = example_41_problem();
    const Vector t = initial_tangent(p41, {{1, 0}, 0, 1}, 1);
    CHECK(abs_cos(t, unit({0, 0.5, -1, 0})) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t[2] > 0.0);
    CHECK(initial_tangent(p41, {{1, 0}, 0, 1}, -1)[2] < 0.0);

    const Builtin sys = make_builtin("ex43", 2);
    const double a = pi / 2;
    const SolutionPoint s0 = oracle_ex43(a, 2);
    Vector expected(sys.problem.dim() + 2, 0.0);
    expected[0] = -0.5 * std::sin(a / 2);
    expected[5] = 0.5 * std::cos(a / 2);
    expected[sys.problem.dim()] = -std::sin(a);
    expected[sys.problem.dim() + 1] = std::cos(a);
    CHECK(abs_cos(initial_tangent(sys.problem, s0, 1), expected) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("starting at a non-simple trivial solution is refused") {
    const Builtin sys = make_builtin("ex43", 2);
    const auto& t = sys.trivial("circle1_pos");
    CHECK_THROWS_AS(initial_tangent(sys.problem, {t.x, 0, t.lambda}, 1), SingularStart);
    CHECK_THROWS_AS(trace_branch(sys.problem, {t.x, 0, t.lambda}, 1), SingularStart);
}

TEST_CASE("newton_correct") {
    const Problem p = example_41_problem();
    const SolutionPoint exact = oracle_ex41(0.7);
    const Vector q = exact.packed();
    const Vector t = initial_tangent(p, exact, 1);
    const CorrectionResult fixed = newton_correct(p, exact, q, t);
    CHECK(fixed.iterations == 0);
    CHECK(fixed.point.packed() == q);

    const SolutionPoint s0{{1, 0}, 0, 1};
    const Vector t0 = initial_tangent(p, s0, 1);
    const Vector pred = axpy(0.05, t0, s0.packed());
    const CorrectionResult c = newton_correct(p, SolutionPoint::unpack(pred), pred, t0);
    const Builtin b = make_builtin("ex41");
    CHECK(b.family("ex41").distance_to(c.point) <= 1e-8);

    ContinuationSettings cfg;
    cfg.newton_max_iter = 3;
    const SolutionPoint far{{0.3, -5}, 40, -30};
    CHECK_THROWS_AS(newton_correct(p, far, far.packed(), t0, cfg, 0.1), CorrectionFailure);
}

TEST_CASE("locate_trivial_crossing") {
    const Problem p = example_41_problem();
    const CrossingResult c = locate_trivial_crossing(p, oracle_ex41(pi - 0.03), oracle_ex41(pi + 0.04));
    CHECK(!c.degraded);
    CHECK(c.point.eps == 0.0);
    CHECK(c.point.lambda == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(c.point.x[0]) <= 1e-12);
    CHECK(c.point.x[1] == doctest::Approx(1.0).epsilon(1e-12));

    const Builtin sys = make_builtin("ex43", 2);
    for (double alpha : {pi, 3 * pi}) {
        const CrossingResult cs =
            locate_trivial_crossing(sys.problem, oracle_ex43(alpha - 0.05, 2), oracle_ex43(alpha + 0.02, 2));
        CHECK(sys.family("ex43").distance_to(cs.point) <= 1e-10);
        CHECK(std::abs(std::abs(cs.point.lambda) - 1.0) <= 1e-10);
    }

    const SolutionPoint a{{1, 0}, 0, 1};
    const CrossingResult same = locate_trivial_crossing(p, a, a);
    CHECK(same.point.packed() == a.packed());
}

TEST_CASE("closed loop with four crossings and a double covering") {
    const Problem p = example_41_problem();
    const ContinuationSettings cfg;
    const Branch b = trace_branch(p, {{1, 0}, 0, 1}, 1, cfg);
    CHECK(b.termination == Termination::ClosedLoop);
    const auto crossings = b.events_of(EventKind::TrivialCrossing);
    REQUIRE(crossings.size() == 4);
    const double expected[4] = {1, -1, 1, -1};
    for (int k = 0; k < 4; ++k) CHECK(std::abs(crossings[k].location.lambda - expected[k]) <= 1e-8);
    CHECK(b.events_of(EventKind::BranchPoint).empty());
    CHECK(std::abs(std::abs(winding_number(b)) - 2.0) <= 1e-6);
    CHECK(b.points.size() >= static_cast<std::size_t>(cfg.min_loop_steps));
    CHECK(norm2(difference(b.points.front().packed(), b.points.back().packed())) <= cfg.loop_tol);
    check_invariants(p, b, cfg);
}

TEST_CASE("transversality at simple crossings") {
    const Problem p = example_41_problem();
    const Branch b = trace_branch(p, {{1, 0}, 0, 1}, -1);
    for (const auto& e : b.events_of(EventKind::TrivialCrossing)) {
        const Vector t = bordered_tangent(p, e.location, b.tangents[e.step_index]);
        CHECK(std::abs(t[p.dim()]) > 1e-3);
        if (e.step_index > 0) CHECK(b.points[e.step_index - 1].eps * b.points[e.step_index].eps < 0.0);
    }
}

TEST_CASE("branch points on the segment loop") {
    const Builtin b = make_builtin("ex42", 8);
    const ContinuationSettings cfg;
    const Branch br = trace_branch(b.problem, b.start("one").point, 1, cfg);
    CHECK(br.termination == Termination::ClosedLoop);
    const auto bps = br.events_of(EventKind::BranchPoint);
    REQUIRE(bps.size() == 2);
    bool seen_plus = false;
    bool seen_minus = false;
    for (const auto& e : bps) {
        CHECK(std::abs(e.location.lambda) <= 1e-4);
        seen_plus = seen_plus || std::abs(e.location.eps - 1.0) <= 1e-4;
        seen_minus = seen_minus || std::abs(e.location.eps + 1.0) <= 1e-4;
    }
    CHECK(seen_plus);
    CHECK(seen_minus);
    CHECK(br.events_of(EventKind::TrivialCrossing).size() == 2);
    check_invariants(b.problem, br, cfg);
}

TEST_CASE("hyperbola branch escapes") {
    const Builtin b = make_builtin("ex42", 8);
    const Branch br = trace_branch(b.problem, b.start("hyperbola_left").point, 1);
    CHECK(br.termination == Termination::Escaped);
    CHECK(distance_to_family(br, b.family("ex42_left")) <= 1e-8);
}

TEST_CASE("secondary launch from the right junction follows the right hyperbola") {
    const Builtin b = make_builtin("ex42", 8);
    ContinuationSettings cfg;
    cfg.secondary_branches = true;
    const TraceResult r = trace_with_secondary(b.problem, b.start("one").point, 1, cfg);
    REQUIRE(r.secondary.size() == 2);
    const auto bps = r.primary.events_of(EventKind::BranchPoint);
    for (std::size_t k = 0; k < bps.size(); ++k) {
        CHECK(r.secondary[k].termination == Termination::Escaped);
        const bool right = bps[k].location.eps > 0;
        CHECK(distance_to_family(r.secondary[k], b.family(right ? "ex42_right" : "ex42_left")) <= 1e-8);
    }
}

TEST_CASE("smooth point passed as a fake branch point resumes the same curve") {
    const Problem p = example_41_problem();
    const Builtin b = make_builtin("ex41");
    const Branch br = trace_branch(p, {{1, 0}, 0, 1}, 1);
    const std::size_t k = 7;
    BranchEvent fake;
    fake.kind = EventKind::BranchPoint;
    fake.location = br.points[k];
    fake.step_index = k;
    const ContinuationSettings cfg;
    const BranchPointPassage pass = continue_past_branch_point(p, fake, br.tangents[k], cfg);
    CHECK(b.family("ex41").distance_to(pass.point) <= 1e-8);
    CHECK(dot(pass.tangent, br.tangents[k]) > 0.0);
    CHECK(pass.kernel.size() == 2);
    // projection onto the incoming tangent equals the 2 h0 step
    const double along = dot(difference(pass.point.packed(), br.points[k].packed()), br.tangents[k]);
    CHECK(along == doctest::Approx(2 * cfg.h0).epsilon(1e-10));
    const Branch resumed = trace_from(p, pass.point, pass.tangent, cfg);
    CHECK(resumed.termination == Termination::ClosedLoop);
    CHECK(distance_to_family(resumed, b.family("ex41")) <= 1e-8);
}

TEST_CASE("no branch points on the constant-solution loop of the system") {
    const Builtin b = make_builtin("ex43", 2);
    const ContinuationSettings cfg;
    const Branch br = trace_branch(b.problem, b.start("alpha_pi_2").point, 1, cfg);
    CHECK(br.termination == Termination::ClosedLoop);
    CHECK(br.events_of(EventKind::BranchPoint).empty());
    CHECK(br.events_of(EventKind::TrivialCrossing).size() == 4);
    CHECK(std::abs(std::abs(winding_number(br)) - 2.0) <= 1e-6);
    check_invariants(b.problem, br, cfg);
}

TEST_CASE("loop through non-simple trivial solutions") {
    const Builtin b = make_builtin("ex44");
    const ContinuationSettings cfg;
    const Branch br = trace_branch(b.problem, b.start("eps1_lambda1").point, 1, cfg);
    CHECK(br.termination == Termination::ClosedLoop);
    const auto crossings = br.events_of(EventKind::TrivialCrossing);
    REQUIRE(crossings.size() == 2);
    for (const auto& e : crossings) {
        CHECK(std::abs(e.location.eps) <= kTrivialEpsTol);
        CHECK(std::abs(e.location.x[0]) <= 1e-5);
        CHECK(std::abs(std::abs(e.location.x[1]) - 1.0) <= 1e-5);
        CHECK(std::abs(e.location.lambda) <= 1e-5);
    }
    CHECK(crossings[0].location.x[1] * crossings[1].location.x[1] < 0.0);
    check_invariants(b.problem, br, cfg);
}

TEST_CASE("step cap ends the trace with MaxSteps") {
    ContinuationSettings cfg;
    cfg.max_steps = 5;
    const Branch br = trace_branch(example_41_problem(), {{1, 0}, 0, 1}, 1, cfg);
    CHECK(br.termination == Termination::MaxSteps);
}

TEST_CASE("settings validation") {
    ContinuationSettings cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.h0 = 1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    ContinuationSettings other;
    CHECK(other.set("R_max", 20.0));
    CHECK(other.escape_radius == 20.0);
    CHECK_FALSE(other.set("nonsense", 1.0));
}
