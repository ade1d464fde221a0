#include "eigbranch/builtins.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "eigbranch/discretize.hpp"

namespace eigbranch {

Problem example_41_problem() {
    return Problem(DenseMatrix{{1, 0}, {0, -1}}, DenseMatrix::identity(2),
                   NonlinearMap::linear(DenseMatrix{{0, 1}, {-1, 0}}), GramMetric::identity(2), std::nullopt, "ex41");
}

Problem example_44_problem() {
    return Problem(DenseMatrix{{0, 0}, {-2, 0}}, DenseMatrix::identity(2),
                   NonlinearMap::linear(DenseMatrix{{0, -1}, {1, 0}}), GramMetric::identity(2), std::nullopt, "ex44");
}

const NamedTrivial& Builtin::trivial(const std::string& label) const {
    for (const auto& t : trivials)
        if (t.name == label) return t;
    throw std::out_of_range("builtin " + name + " has no trivial solution named '" + label + "'");
}

const OracleFamily& Builtin::family(const std::string& label) const {
    for (const auto& f : families)
        if (f.label() == label) return f;
    throw std::out_of_range("builtin " + name + " has no oracle family named '" + label + "'");
}

const NamedStart& Builtin::start(const std::string& label) const {
    for (const auto& s : starts)
        if (s.name == label) return s;
    throw std::out_of_range("builtin " + name + " has no start point named '" + label + "'");
}

std::vector<std::string> builtin_names() { return {"ex41", "ex42", "ex43", "ex44"}; }

namespace {

using std::numbers::pi;

Builtin build_ex41() {
    Builtin b{"ex41", 0, example_41_problem(), {}, {}, {}};
    b.trivials = {{"e1", {1, 0}, 1.0}, {"-e1", {-1, 0}, 1.0}, {"e2", {0, 1}, -1.0}, {"-e2", {0, -1}, -1.0}};
    b.families.emplace_back("ex41", 0.0, 4 * pi, true, oracle_ex41, b.problem);
    b.starts = {{"theta0", oracle_ex41(0.0)}};
    return b;
}

Builtin build_ex42(std::size_t modes) {
    Builtin b{"ex42", modes, fourier_problem_scalar(modes), {}, {}, {}};
    const FourierBasis basis{modes, 1};
    Vector one(basis.dim(), 0.0);
    one[basis.constant_index()] = 1.0;
    b.trivials = {{"one", one, 0.0}, {"-one", scaled(one, -1.0), 0.0}};
    b.families.emplace_back("ex42_segment", 0.0, 2 * pi, true,
                            [modes](double t) { return oracle_ex42_segment(t, modes); }, b.problem);
    b.families.emplace_back("ex42_left", -20.0, 20.0, false,
                            [modes](double s) { return oracle_ex42_hyperbola(HyperbolaSide::Left, s, modes); },
                            b.problem);
    b.families.emplace_back("ex42_right", -20.0, 20.0, false,
                            [modes](double s) { return oracle_ex42_hyperbola(HyperbolaSide::Right, s, modes); },
                            b.problem);
    b.starts = {{"one", {one, 0.0, 0.0}},
                {"hyperbola_left", oracle_ex42_hyperbola(HyperbolaSide::Left, 1.0, modes)}};
    return b;
}

Builtin build_ex43(std::size_t modes) {
    Builtin b{"ex43", modes, fourier_problem_system(modes), {}, {}, {}};
    for (int k = 0; k < 4; ++k) {
        const double alpha = pi / 2 + k * pi;
        const SolutionPoint s = oracle_ex43(alpha, modes);
        b.trivials.push_back({"gamma" + std::to_string(k + 1), s.x, s.lambda, true});
    }
    // Off-component trivial solutions: circles Ker(L -+ sqrt(1+n^2) C) cap S.
    const Problem& p = b.problem;
    for (std::size_t n = 1; n <= modes; ++n) {
        for (int sign : {1, -1}) {
            const double lambda = sign * std::sqrt(1.0 + static_cast<double>(n * n));
            const auto kernel = kernel_basis(p.l_matrix() - lambda * p.c_matrix());
            if (kernel.empty()) throw std::logic_error("ex43: expected a kernel at lambda = sqrt(1+n^2)");
            const std::string name =
                std::string("circle") + std::to_string(n) + (sign > 0 ? "_pos" : "_neg");
            b.trivials.push_back({name, project_to_sphere(p.gram_g(), kernel.front()), lambda, false});
        }
    }
    b.families.emplace_back("ex43", 0.0, 4 * pi, true, [modes](double a) { return oracle_ex43(a, modes); },
                            b.problem);
    b.starts = {{"alpha_pi_2", oracle_ex43(pi / 2, modes)}};
    return b;
}

Builtin build_ex44() {
    Builtin b{"ex44", 0, example_44_problem(), {}, {}, {}};
    b.trivials = {{"e2", {0, 1}, 0.0}, {"-e2", {0, -1}, 0.0}};
    b.families.emplace_back("ex44", 0.0, 4 * pi, true, oracle_ex44, b.problem);
    const double r = std::sqrt(0.5);
    b.starts = {{"eps1_lambda1", {{r, -r}, 1.0, 1.0}}};
    return b;
}

}  // namespace

Builtin make_builtin(const std::string& name, std::size_t modes) {
    if (name == "ex41") return build_ex41();
    if (name == "ex44") return build_ex44();
    if (name == "ex42" || name == "ex43") {
        if (modes < 1) throw std::invalid_argument(name + " needs modes >= 1");
        return name == "ex42" ? build_ex42(modes) : build_ex43(modes);
    }
    throw std::invalid_argument("unknown builtin problem '" + name + "'");
}

}  // namespace eigbranch
