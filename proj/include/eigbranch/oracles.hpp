#pragma once

#include <functional>
#include <string>

#include "eigbranch/continuation.hpp"

namespace eigbranch {

enum class HyperbolaSide { Left, Right };

// Closed-form solution families of the built-in problems.

/// ((cos(t/2), sin(t/2)), -sin t, cos t), 4pi-periodic.
SolutionPoint oracle_ex41(double theta);
/// (cos t0 + sin t0 cos(.), sin t0, 0) in the M-mode scalar basis.
SolutionPoint oracle_ex42_segment(double theta, std::size_t modes);
/// Left: (-(s sin + cos)/sqrt(1+s^2), -sqrt(1+s^2), s); right: both signs flipped on x and eps.
SolutionPoint oracle_ex42_hyperbola(HyperbolaSide side, double s, std::size_t modes);
/// Constant (cos(a/2), sin(a/2)) with (eps, lambda) = (cos a, sin a).
SolutionPoint oracle_ex43(double alpha, std::size_t modes);
/// ((-sin(f/2), cos(f/2)), 1 - cos f, sin f). Traces eps(eps - 2) + lambda^2 = 0.
SolutionPoint oracle_ex44(double phi);

/// A parametrized curve of solution triples over [param_min, param_max].
class OracleFamily {
public:
    /// Runs the construction self-test: 64 samples must satisfy the augmented
    /// residual of `problem` to 1e-10. Throws std::logic_error otherwise.
    OracleFamily(std::string label, double param_min, double param_max, bool periodic,
                 std::function<SolutionPoint(double)> eval, const Problem& problem);

    const std::string& label() const { return label_; }
    double param_min() const { return lo_; }
    double param_max() const { return hi_; }
    bool periodic() const { return periodic_; }
    SolutionPoint operator()(double t) const { return eval_(t); }

    /// min over the parameter of the Euclidean distance on (x, eps, lambda).
    double distance_to(const SolutionPoint& s) const;
    double nearest_parameter(const SolutionPoint& s) const;

    double max_self_test_residual() const { return self_test_residual_; }

private:
    std::string label_;
    double lo_;
    double hi_;
    bool periodic_;
    std::function<SolutionPoint(double)> eval_;
    double self_test_residual_ = 0.0;
};

/// Max over branch points of the distance to the family.
double distance_to_family(std::span<const SolutionPoint> points, const OracleFamily& f);
double distance_to_family(const Branch& b, const OracleFamily& f);

}  // namespace eigbranch
