#pragma once

#include <string>
#include <vector>

#include "eigbranch/oracles.hpp"

namespace eigbranch {

/// 2x2: L = diag(1, -1), N(x) = (x2, -x1), C = I.
Problem example_41_problem();
/// 2x2: L(x) = (0, -2 x1), N(x) = (-x2, x1), C = I.
Problem example_44_problem();

struct NamedTrivial {
    std::string name;
    Vector x;
    double lambda = 0.0;
    bool on_primary_component = true;  // false for trivial solutions off the traced component
};

struct NamedStart {
    std::string name;
    SolutionPoint point;
};

/// A built-in problem with its trivial solutions, oracle families and
/// suggested start points.
struct Builtin {
    std::string name;  // ex41 | ex42 | ex43 | ex44
    std::size_t modes = 0;
    Problem problem;
    std::vector<NamedTrivial> trivials;
    std::vector<OracleFamily> families;
    std::vector<NamedStart> starts;

    const NamedTrivial& trivial(const std::string& label) const;
    const OracleFamily& family(const std::string& label) const;
    const NamedStart& start(const std::string& label) const;
};

/// name in {ex41, ex42, ex43, ex44}; modes ignored for the 2x2 problems.
Builtin make_builtin(const std::string& name, std::size_t modes = 0);
std::vector<std::string> builtin_names();

}  // namespace eigbranch
