#include "eigbranch/simplicity.hpp"

#include <cmath>
#include <sstream>

namespace eigbranch {

std::string to_string(SimplicityVerdict v) {
    switch (v) {
        case SimplicityVerdict::Simple: return "Simple";
        case SimplicityVerdict::NotSimpleKernelDim: return "NotSimple_KernelDim";
        case SimplicityVerdict::NotSimpleCxZero: return "NotSimple_CxZero";
        case SimplicityVerdict::NotSimpleSolvable: return "NotSimple_Solvable";
    }
    return "?";
}

namespace {

DenseMatrix shifted_operator(const Problem& p, double lambda_star) {
    return p.l_matrix() - lambda_star * p.c_matrix();
}

// gram_g-orthonormal basis of {v : x*^T W v = 0}.
std::vector<Vector> sphere_tangent_basis(const GramMetric& g, std::span<const double> x_star) {
    const Vector wx = g.apply(x_star);
    const DenseMatrix row = DenseMatrix::from_rows({wx});
    std::vector<Vector> raw = kernel_basis(row);
    std::vector<Vector> out;
    for (auto v : raw) {
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : out) v = axpy(-gram_inner(g, b, v), b, v);
        out.push_back(scaled(v, 1.0 / g.norm(v)));
    }
    return out;
}

}  // namespace

double dpsi_min_singular(const Problem& p, std::span<const double> x_star, double lambda_star) {
    const std::size_t d = p.dim();
    if (x_star.size() != d) throw DimensionError("dpsi_min_singular: x* has the wrong dimension");
    const DenseMatrix a = shifted_operator(p, lambda_star);
    const std::vector<Vector> t = sphere_tangent_basis(p.gram_g(), x_star);
    DenseMatrix m(d, d);
    for (std::size_t j = 0; j < t.size(); ++j) m.set_column(j, a * t[j]);
    m.set_column(d - 1, scaled(p.c_matrix() * x_star, -1.0));
    return min_singular_values(m, 1).front();
}

SimplicityReport check_simple(const Problem& p, std::span<const double> x_star, double lambda_star,
                              const SimplicityTolerances& tols) {
    const std::size_t d = p.dim();
    if (x_star.size() != d) throw DimensionError("check_simple: x* has the wrong dimension");
    const SolutionPoint trivial{Vector(x_star.begin(), x_star.end()), 0.0, lambda_star};
    const Vector res = phi(p, trivial);
    const double res_norm = p.gram_h().norm(res);
    const double sphere = std::abs(gram_inner(p.gram_g(), x_star, x_star) - 1.0);
    if (!(res_norm <= tols.residual) || !(sphere <= tols.residual)) {
        std::ostringstream msg;
        msg << "check_simple: (x*, 0, lambda*) is not a trivial solution (residual " << res_norm
            << ", sphere defect " << sphere << ")";
        throw PreconditionError(msg.str());
    }

    SimplicityReport r;
    r.tolerances = tols;
    const DenseMatrix a = shifted_operator(p, lambda_star);
    const std::vector<Vector> kernel = kernel_basis(a, tols.rank);
    r.kernel_dim = kernel.size();
    if (r.kernel_dim == 1) {
        r.kernel_alignment = std::abs(dot(kernel.front(), x_star)) / norm2(x_star);
    }
    const Vector cx = p.c_matrix() * x_star;
    r.c_xstar_norm = p.gram_h().norm(cx);
    r.ls_residual = least_squares(a, cx, tols.rank).residual_norm;
    r.dpsi_margin = dpsi_min_singular(p, x_star, lambda_star);

    if (r.kernel_dim != 1 || r.kernel_alignment < 1.0 - tols.alignment)
        r.verdict = SimplicityVerdict::NotSimpleKernelDim;
    else if (!(r.c_xstar_norm > tols.c_zero))
        r.verdict = SimplicityVerdict::NotSimpleCxZero;
    else if (!(r.ls_residual > tols.solvable))
        r.verdict = SimplicityVerdict::NotSimpleSolvable;
    else
        r.verdict = SimplicityVerdict::Simple;
    return r;
}

}  // namespace eigbranch
