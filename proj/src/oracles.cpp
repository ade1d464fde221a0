#include "eigbranch/oracles.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "eigbranch/discretize.hpp"

namespace eigbranch {

SolutionPoint oracle_ex41(double theta) {
    return {{std::cos(theta / 2), std::sin(theta / 2)}, -std::sin(theta), std::cos(theta)};
}

SolutionPoint oracle_ex42_segment(double theta, std::size_t modes) {
    const FourierBasis basis{modes, 1};
    Vector x(basis.dim(), 0.0);
    x[basis.constant_index()] = std::cos(theta);
    x[basis.cos_index(1)] = std::sin(theta);
    return {std::move(x), std::sin(theta), 0.0};
}

SolutionPoint oracle_ex42_hyperbola(HyperbolaSide side, double s, std::size_t modes) {
    const FourierBasis basis{modes, 1};
    const double sign = side == HyperbolaSide::Left ? -1.0 : 1.0;
    const double root = std::sqrt(1.0 + s * s);
    Vector x(basis.dim(), 0.0);
    x[basis.sin_index(1)] = sign * s / root;
    x[basis.cos_index(1)] = sign / root;
    return {std::move(x), sign * root, s};
}

SolutionPoint oracle_ex43(double alpha, std::size_t modes) {
    const FourierBasis basis{modes, 2};
    Vector x(basis.dim(), 0.0);
    x[basis.constant_index(0)] = std::cos(alpha / 2);
    x[basis.constant_index(1)] = std::sin(alpha / 2);
    return {std::move(x), std::cos(alpha), std::sin(alpha)};
}

SolutionPoint oracle_ex44(double phi) {
    return {{-std::sin(phi / 2), std::cos(phi / 2)}, 1.0 - std::cos(phi), std::sin(phi)};
}

OracleFamily::OracleFamily(std::string label, double param_min, double param_max, bool periodic,
                           std::function<SolutionPoint(double)> eval, const Problem& problem)
    : label_(std::move(label)), lo_(param_min), hi_(param_max), periodic_(periodic), eval_(std::move(eval)) {
    if (!(hi_ > lo_)) throw std::invalid_argument("OracleFamily: empty parameter interval");
    constexpr int kSamples = 64;
    for (int i = 0; i < kSamples; ++i) {
        const double t = lo_ + (hi_ - lo_) * (i + 0.5) / kSamples;
        const SolutionPoint s = eval_(t);
        if (s.x.size() != problem.dim()) throw std::logic_error("OracleFamily " + label_ + ": dimension mismatch");
        self_test_residual_ = std::max(self_test_residual_, max_abs(augmented_residual(problem, s)));
    }
    if (!(self_test_residual_ <= 1e-10))
        throw std::logic_error("OracleFamily " + label_ + ": samples do not solve the problem");
}

double OracleFamily::nearest_parameter(const SolutionPoint& s) const {
    const Vector target = s.packed();
    auto dist = [&](double t) { return norm2(difference(eval_(t).packed(), target)); };
    constexpr int kSamples = 1024;
    const double dt = (hi_ - lo_) / kSamples;
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= kSamples; ++i) {
        const double d = dist(lo_ + i * dt);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    // golden-section on the bracket around the best sample
    double a = lo_ + (best - 1) * dt;
    double b = lo_ + (best + 1) * dt;
    if (!periodic_) {
        a = std::max(a, lo_);
        b = std::min(b, hi_);
    }
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = dist(c);
    double fd = dist(d);
    for (int it = 0; it < 200 && (b - a) > 1e-15 * (1.0 + std::abs(a)); ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = dist(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = dist(d);
        }
    }
    const double mid = 0.5 * (a + b);
    return dist(mid) < best_d ? mid : lo_ + best * dt;
}

double OracleFamily::distance_to(const SolutionPoint& s) const {
    const double t = nearest_parameter(s);
    return norm2(difference(eval_(t).packed(), s.packed()));
}

double distance_to_family(std::span<const SolutionPoint> points, const OracleFamily& f) {
    double worst = 0.0;
    for (const auto& s : points) worst = std::max(worst, f.distance_to(s));
    return worst;
}

double distance_to_family(const Branch& b, const OracleFamily& f) { return distance_to_family(b.points, f); }

}  // namespace eigbranch
