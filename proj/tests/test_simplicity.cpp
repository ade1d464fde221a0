#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "eigbranch/builtins.hpp"
#include "eigbranch/simplicity.hpp"

using namespace eigbranch;

TEST_CASE("2x2 example with four simple trivial solutions") {
    const Problem p = example_41_problem();
    const SimplicityReport r = check_simple(p, Vector{1, 0}, 1.0);
    CHECK(r.verdict == SimplicityVerdict::Simple);
    CHECK(r.kernel_dim == 1);
    CHECK(r.ls_residual == doctest::Approx(1.0));
    CHECK(r.dpsi_margin == doctest::Approx(1.0));
    for (const auto& t : make_builtin("ex41").trivials) CHECK(check_simple(p, t.x, t.lambda).simple());
}

TEST_CASE("non-simple trivial solution with a one-dimensional kernel") {
    const SimplicityReport r = check_simple(example_44_problem(), Vector{0, 1}, 0.0);
    CHECK(r.verdict == SimplicityVerdict::NotSimpleSolvable);
    CHECK(r.kernel_dim == 1);
    CHECK(r.ls_residual <= 1e-15);
    CHECK(r.dpsi_margin <= 1e-15);
    CHECK(to_string(r.verdict) == "NotSimple_Solvable");
}

TEST_CASE("Fourier problems") {
    for (std::size_t m : {1u, 8u}) {
        const Builtin b = make_builtin("ex42", m);
        for (const auto& t : b.trivials) {
            const SimplicityReport r = check_simple(b.problem, t.x, t.lambda);
            CHECK(r.simple());
            if (m == 8) CHECK(r.ls_residual > 0.3);
        }
    }
    const Builtin sys = make_builtin("ex43", 2);
    for (const auto& t : sys.trivials) {
        const SimplicityReport r = check_simple(sys.problem, t.x, t.lambda);
        if (t.on_primary_component) {
            CHECK(r.verdict == SimplicityVerdict::Simple);
        } else {
            CHECK(r.verdict == SimplicityVerdict::NotSimpleKernelDim);
            CHECK(r.kernel_dim == 2);
        }
    }
}

TEST_CASE("zero C fails the second condition") {
    const Problem p(DenseMatrix{{0, 0}, {0, 1}}, DenseMatrix(2, 2), NonlinearMap::zero(2), GramMetric::identity(2));
    const SimplicityReport r = check_simple(p, Vector{1, 0}, 0.0);
    CHECK(r.verdict == SimplicityVerdict::NotSimpleCxZero);
}

TEST_CASE("sign symmetry and verdict-margin agreement on every built-in trivial solution") {
    for (const auto& [name, modes] : {std::pair<const char*, std::size_t>{"ex41", 0}, {"ex42", 1}, {"ex42", 8},
                                      {"ex43", 2}, {"ex44", 0}}) {
        const Builtin b = make_builtin(name, modes);
        for (const auto& t : b.trivials) {
            const SimplicityReport plus = check_simple(b.problem, t.x, t.lambda);
            const SimplicityReport minus = check_simple(b.problem, scaled(t.x, -1.0), t.lambda);
            CHECK(plus.verdict == minus.verdict);
            CHECK(plus.dpsi_margin == doctest::Approx(minus.dpsi_margin).epsilon(1e-10));
            CHECK(plus.simple() == (plus.dpsi_margin > plus.tolerances.margin));
        }
    }
}

TEST_CASE("precondition: the input must be a trivial solution") {
    CHECK_THROWS_AS(check_simple(example_41_problem(), Vector{1, 0}, 0.5), PreconditionError);
    CHECK_THROWS_AS(check_simple(example_41_problem(), Vector{2, 0}, 1.0), PreconditionError);
}

TEST_CASE("dpsi_min_singular") {
    CHECK(dpsi_min_singular(example_41_problem(), Vector{1, 0}, 1.0) == doctest::Approx(1.0));
    CHECK(dpsi_min_singular(example_44_problem(), Vector{0, 1}, 0.0) <= 1e-15);
    CHECK(dpsi_min_singular(example_41_problem(), Vector{-1, 0}, 1.0) == doctest::Approx(1.0));
}
