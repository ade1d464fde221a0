#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "eigbranch/builtins.hpp"
#include "eigbranch/discretize.hpp"

using namespace eigbranch;
using std::numbers::pi;

TEST_CASE("2x2 family samples") {
    const SolutionPoint a = oracle_ex41(0.0);
    CHECK(a.x == Vector{1.0, 0.0});
    CHECK(a.eps == 0.0);
    CHECK(a.lambda == 1.0);
    const SolutionPoint b = oracle_ex41(pi);
    CHECK(std::abs(b.x[0]) <= 1e-15);
    CHECK(b.x[1] == 1.0);
    CHECK(std::abs(b.eps) <= 1e-15);
    CHECK(b.lambda == -1.0);
    const SolutionPoint c = oracle_ex41(2 * pi);
    CHECK(c.x[0] == -1.0);
    CHECK(c.lambda == 1.0);
}

TEST_CASE("segment family") {
    const FourierBasis basis{8, 1};
    const SolutionPoint s0 = oracle_ex42_segment(0.0, 8);
    CHECK(s0.x[basis.constant_index()] == 1.0);
    CHECK(s0.eps == 0.0);
    const SolutionPoint j = oracle_ex42_segment(1.5 * pi, 8);
    CHECK(std::abs(j.x[basis.constant_index()]) <= 1e-15);
    CHECK(j.x[basis.cos_index(1)] == -1.0);
    CHECK(j.eps == -1.0);
    const Problem p = fourier_problem_scalar(8);
    for (double t = 0; t < 2 * pi; t += 0.1) CHECK(p.gram_g().norm(oracle_ex42_segment(t, 8).x) == doctest::Approx(1.0));
}

TEST_CASE("hyperbola families") {
    const FourierBasis basis{4, 1};
    const SolutionPoint l = oracle_ex42_hyperbola(HyperbolaSide::Left, 0.0, 4);
    CHECK(l.x[basis.cos_index(1)] == -1.0);
    CHECK(l.eps == -1.0);
    CHECK(l.lambda == 0.0);
    const SolutionPoint r = oracle_ex42_hyperbola(HyperbolaSide::Right, 0.0, 4);
    CHECK(r.x[basis.cos_index(1)] == 1.0);
    CHECK(r.eps == 1.0);
    for (double s = -5; s <= 5; s += 0.25)
        for (auto side : {HyperbolaSide::Left, HyperbolaSide::Right}) {
            const SolutionPoint h = oracle_ex42_hyperbola(side, s, 4);
            CHECK(std::abs(h.eps * h.eps - h.lambda * h.lambda - 1.0) <= 1e-12);
        }
}

TEST_CASE("system family") {
    const FourierBasis basis{2, 2};
    const SolutionPoint s = oracle_ex43(pi / 2, 2);
    CHECK(s.x[basis.constant_index(0)] == doctest::Approx(std::sqrt(0.5)));
    CHECK(s.x[basis.constant_index(1)] == doctest::Approx(std::sqrt(0.5)));
    CHECK(s.lambda == 1.0);
    const SolutionPoint t = oracle_ex43(1.5 * pi, 2);
    CHECK(t.x[basis.constant_index(0)] == doctest::Approx(-std::sqrt(0.5)));
    CHECK(t.x[basis.constant_index(1)] == doctest::Approx(std::sqrt(0.5)));
    CHECK(t.lambda == -1.0);
    for (double a = 0; a < 4 * pi; a += 0.3) {
        const SolutionPoint u = oracle_ex43(a, 2);
        CHECK(u.eps * u.eps + u.lambda * u.lambda == doctest::Approx(1.0));
    }
}

TEST_CASE("derived 2x2 family checked by direct substitution") {
    // -eps x2 = lambda x1,  (-2 + eps) x1 = lambda x2,  |x| = 1
    for (int k = 0; k <= 4000; ++k) {
        const double f = 4 * pi * k / 4000.0;
        const SolutionPoint s = oracle_ex44(f);
        CHECK(std::abs(-s.eps * s.x[1] - s.lambda * s.x[0]) <= 1e-14);
        CHECK(std::abs((-2 + s.eps) * s.x[0] - s.lambda * s.x[1]) <= 1e-14);
        CHECK(std::abs(s.x[0] * s.x[0] + s.x[1] * s.x[1] - 1.0) <= 1e-14);
        CHECK(std::abs(s.eps * (s.eps - 2) + s.lambda * s.lambda) <= 1e-14);
    }
    const SolutionPoint p = oracle_ex44(0.0);
    CHECK(p.x == Vector{-0.0, 1.0});
    CHECK(p.eps == 0.0);
    CHECK(p.lambda == 0.0);
}

TEST_CASE("self-test of every built-in family and periodicity") {
    for (const auto& [name, modes] : {std::pair<const char*, std::size_t>{"ex41", 0}, {"ex42", 8}, {"ex43", 2},
                                      {"ex44", 0}}) {
        const Builtin b = make_builtin(name, modes);
        for (const auto& f : b.families) CHECK(f.max_self_test_residual() <= 1e-10);
    }
    auto gap = [](const SolutionPoint& a, const SolutionPoint& b) { return norm2(difference(a.packed(), b.packed())); };
    CHECK(gap(oracle_ex41(0), oracle_ex41(4 * pi)) <= 1e-12);
    CHECK(gap(oracle_ex44(0), oracle_ex44(4 * pi)) <= 1e-12);
    CHECK(gap(oracle_ex42_segment(0, 3), oracle_ex42_segment(2 * pi, 3)) <= 1e-12);
}

TEST_CASE("a family that does not solve the problem fails its self-test") {
    CHECK_THROWS_AS(OracleFamily("bad", 0, 1, false, [](double t) { return SolutionPoint{{1, 0}, t, 1}; },
                                 example_41_problem()),
                    std::logic_error);
}

TEST_CASE("distance_to_family") {
    const Builtin b = make_builtin("ex41");
    const OracleFamily& f = b.family("ex41");
    std::vector<SolutionPoint> samples;
    for (double t = 0.013; t < 4 * pi; t += 0.37) samples.push_back(oracle_ex41(t));
    CHECK(distance_to_family(samples, f) <= 1e-9);

    samples[5].eps += 1e-3;
    CHECK(distance_to_family(samples, f) >= 9e-4);
}
