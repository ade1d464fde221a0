#include "eigbranch/problem.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace eigbranch {

NonlinearMap NonlinearMap::linear(DenseMatrix n) {
    auto shared = std::make_shared<const DenseMatrix>(std::move(n));
    return {[shared](std::span<const double> x) { return (*shared) * x; },
            [shared](std::span<const double>) { return *shared; }};
}

NonlinearMap NonlinearMap::constant(Vector value) {
    const std::size_t n = value.size();
    return {[value = std::move(value)](std::span<const double>) { return value; },
            [n](std::span<const double>) { return DenseMatrix(n, n); }};
}

NonlinearMap NonlinearMap::zero(std::size_t dim) { return constant(Vector(dim, 0.0)); }

NonlinearMap NonlinearMap::general(std::function<Vector(std::span<const double>)> eval,
                                   std::function<DenseMatrix(std::span<const double>)> jacobian) {
    return {std::move(eval), std::move(jacobian)};
}

Problem::Problem(DenseMatrix l, DenseMatrix c, NonlinearMap n, GramMetric gram_g,
                 std::optional<GramMetric> gram_h, std::string label)
    : l_(std::move(l)),
      c_(std::move(c)),
      n_(std::move(n)),
      gram_g_(std::move(gram_g)),
      gram_h_(gram_h ? std::move(*gram_h) : GramMetric::identity(l_.rows())),
      label_(std::move(label)) {
    const std::size_t d = l_.rows();
    if (!l_.square()) throw DimensionError("Problem: L must be square (dim G = dim H)");
    if (c_.rows() != d || c_.cols() != d) throw DimensionError("Problem: C must be dim x dim");
    if (gram_g_.dim() != d || gram_h_.dim() != d) throw DimensionError("Problem: Gram metrics must be dim x dim");
    if (!l_.all_finite() || !c_.all_finite()) throw DimensionError("Problem: L and C must be finite");
    if (!n_.eval) throw std::invalid_argument("Problem: N evaluator is required");
}

Vector Problem::eval_n(std::span<const double> x) const {
    Vector v = n_.eval(x);
    if (v.size() != dim()) throw DimensionError("Problem: N returned a vector of the wrong length");
    return v;
}

DenseMatrix Problem::eval_dn(std::span<const double> x, double h) const {
    if (n_.jacobian) return n_.jacobian(x);
    const std::size_t d = dim();
    DenseMatrix dn(d, d);
    if (h <= 0.0) h = fd_step_for(x);
    Vector xp(x.begin(), x.end());
    for (std::size_t j = 0; j < d; ++j) {
        const double xj = xp[j];
        xp[j] = xj + h;
        const Vector fp = eval_n(xp);
        xp[j] = xj - h;
        const Vector fm = eval_n(xp);
        xp[j] = xj;
        for (std::size_t i = 0; i < d; ++i) dn(i, j) = (fp[i] - fm[i]) / (2.0 * h);
    }
    return dn;
}

Vector SolutionPoint::packed() const {
    Vector q = x;
    q.push_back(eps);
    q.push_back(lambda);
    return q;
}

SolutionPoint SolutionPoint::unpack(std::span<const double> q) {
    if (q.size() < 2) throw DimensionError("SolutionPoint::unpack: need at least eps and lambda");
    SolutionPoint s;
    s.x.assign(q.begin(), q.end() - 2);
    s.eps = q[q.size() - 2];
    s.lambda = q[q.size() - 1];
    return s;
}

double fd_step_for(std::span<const double> x) { return 1e-6 * (1.0 + norm2(x)); }

Vector phi(const Problem& p, const SolutionPoint& s) {
    if (s.x.size() != p.dim()) throw DimensionError("phi: x has the wrong dimension");
    Vector r = p.l_matrix() * s.x;
    const Vector n = p.eval_n(s.x);
    const Vector cx = p.c_matrix() * s.x;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += s.eps * n[i] - s.lambda * cx[i];
    return r;
}

Vector augmented_residual(const Problem& p, const SolutionPoint& s) {
    Vector r = phi(p, s);
    r.push_back(0.5 * (gram_inner(p.gram_g(), s.x, s.x) - 1.0));
    return r;
}

double residual_norm(const Problem& p, std::span<const double> augmented) {
    const std::size_t d = p.dim();
    const auto block = augmented.first(d);
    const double h2 = std::max(0.0, gram_inner(p.gram_h(), block, block));
    const double tail = augmented.size() > d ? augmented[d] : 0.0;
    return std::sqrt(h2 + tail * tail);
}

DenseMatrix jacobian(const Problem& p, const SolutionPoint& s, double fd_step) {
    const std::size_t d = p.dim();
    if (s.x.size() != d) throw DimensionError("jacobian: x has the wrong dimension");
    DenseMatrix j(d + 1, d + 2);
    const DenseMatrix dn = p.eval_dn(s.x, fd_step);
    const Vector n = p.eval_n(s.x);
    const Vector cx = p.c_matrix() * s.x;
    const Vector wx = p.gram_g().apply(s.x);
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c)
            j(r, c) = p.l_matrix()(r, c) + s.eps * dn(r, c) - s.lambda * p.c_matrix()(r, c);
        j(r, d) = n[r];
        j(r, d + 1) = -cx[r];
    }
    for (std::size_t c = 0; c < d; ++c) j(d, c) = wx[c];
    return j;
}

DenseMatrix fd_jacobian(const Problem& p, const SolutionPoint& s, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("fd_jacobian: step must be positive");
    const std::size_t d = p.dim();
    DenseMatrix j(d + 1, d + 2);
    Vector q = s.packed();
    for (std::size_t c = 0; c < d + 2; ++c) {
        const double qc = q[c];
        q[c] = qc + h;
        const Vector fp = augmented_residual(p, SolutionPoint::unpack(q));
        q[c] = qc - h;
        const Vector fm = augmented_residual(p, SolutionPoint::unpack(q));
        q[c] = qc;
        for (std::size_t r = 0; r < d + 1; ++r) j(r, c) = (fp[r] - fm[r]) / (2.0 * h);
    }
    return j;
}

Vector project_to_sphere(const GramMetric& g, std::span<const double> x) {
    const double n = g.norm(x);
    if (!(n > 0.0)) throw std::invalid_argument("project_to_sphere: zero vector");
    return scaled(x, 1.0 / n);
}

}  // namespace eigbranch
