#pragma once

#include <functional>
#include <optional>
#include <string>

#include "eigbranch/numerics.hpp"

namespace eigbranch {

/// The perturbation N together with an optional analytic derivative.
/// Evaluators must be reentrant: traces over one Problem may run concurrently.
struct NonlinearMap {
    std::function<Vector(std::span<const double>)> eval;
    std::function<DenseMatrix(std::span<const double>)> jacobian;  // empty: finite differences

    static NonlinearMap linear(DenseMatrix n);
    static NonlinearMap constant(Vector value);
    static NonlinearMap zero(std::size_t dim);
    static NonlinearMap general(std::function<Vector(std::span<const double>)> eval,
                                std::function<DenseMatrix(std::span<const double>)> jacobian = {});
};

/// Finite-dimensional surrogate of  L x + eps N(x) = lambda C x,  x on the
/// unit sphere of gram_g. Immutable after construction.
class Problem {
public:
    Problem(DenseMatrix l, DenseMatrix c, NonlinearMap n, GramMetric gram_g,
            std::optional<GramMetric> gram_h = std::nullopt, std::string label = {});

    std::size_t dim() const { return l_.rows(); }
    const DenseMatrix& l_matrix() const { return l_; }
    const DenseMatrix& c_matrix() const { return c_; }
    const NonlinearMap& n_map() const { return n_; }
    const GramMetric& gram_g() const { return gram_g_; }
    const GramMetric& gram_h() const { return gram_h_; }
    const std::string& label() const { return label_; }

    Vector eval_n(std::span<const double> x) const;
    /// DN(x): analytic when provided, else central differences with step h
    /// (h <= 0 selects fd_step_for(x)).
    DenseMatrix eval_dn(std::span<const double> x, double h = 0.0) const;

private:
    DenseMatrix l_;
    DenseMatrix c_;
    NonlinearMap n_;
    GramMetric gram_g_;
    GramMetric gram_h_;
    std::string label_;
};

struct SolutionPoint {
    Vector x;
    double eps = 0.0;
    double lambda = 0.0;

    /// Packs (x, eps, lambda) into one vector of length dim + 2.
    Vector packed() const;
    static SolutionPoint unpack(std::span<const double> q);
};

double fd_step_for(std::span<const double> x);

Vector phi(const Problem& p, const SolutionPoint& s);
Vector augmented_residual(const Problem& p, const SolutionPoint& s);
/// gram_h norm of the Phi block combined with the sphere entry.
double residual_norm(const Problem& p, std::span<const double> augmented);

/// (dim+1) x (dim+2): [L + eps DN - lambda C | N(x) | -C x] over [(W_G x)^T 0 0].
DenseMatrix jacobian(const Problem& p, const SolutionPoint& s, double fd_step = 0.0);
DenseMatrix fd_jacobian(const Problem& p, const SolutionPoint& s, double h);

/// x / sqrt(x^T W_G x)
Vector project_to_sphere(const GramMetric& g, std::span<const double> x);

}  // namespace eigbranch
