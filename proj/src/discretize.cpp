#include "eigbranch/discretize.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace eigbranch {

std::size_t FourierBasis::cos_index(std::size_t k, std::size_t component) const {
    if (k == 0 || k > modes) throw std::out_of_range("FourierBasis: mode out of range");
    return component * block_size() + 2 * k - 1;
}

std::size_t FourierBasis::sin_index(std::size_t k, std::size_t component) const {
    if (k == 0 || k > modes) throw std::out_of_range("FourierBasis: mode out of range");
    return component * block_size() + 2 * k;
}

DenseMatrix FourierBasis::derivative_block() const {
    const std::size_t n = block_size();
    DenseMatrix d(n, n);
    for (std::size_t k = 1; k <= modes; ++k) {
        const auto c = 2 * k - 1;
        const auto s = 2 * k;
        const double kk = static_cast<double>(k);
        d(s, c) = -kk;  // (cos kt)' = -k sin kt
        d(c, s) = kk;   // (sin kt)' =  k cos kt
    }
    return d;
}

Vector FourierBasis::h1_weights() const {
    Vector w;
    w.reserve(dim());
    for (std::size_t comp = 0; comp < components; ++comp) {
        w.push_back(1.0);
        for (std::size_t k = 1; k <= modes; ++k) {
            const double v = 0.5 * (1.0 + static_cast<double>(k * k));
            w.push_back(v);
            w.push_back(v);
        }
    }
    return w;
}

Vector FourierBasis::l2_weights() const {
    Vector w;
    w.reserve(dim());
    for (std::size_t comp = 0; comp < components; ++comp) {
        w.push_back(1.0);
        for (std::size_t k = 1; k <= modes; ++k) {
            w.push_back(0.5);
            w.push_back(0.5);
        }
    }
    return w;
}

Vector FourierBasis::evaluate(std::span<const double> coords, double t) const {
    if (coords.size() != dim()) throw DimensionError("FourierBasis::evaluate: coordinate length mismatch");
    Vector out(components, 0.0);
    for (std::size_t comp = 0; comp < components; ++comp) {
        double v = coords[constant_index(comp)];
        for (std::size_t k = 1; k <= modes; ++k) {
            const double kt = static_cast<double>(k) * t;
            v += coords[cos_index(k, comp)] * std::cos(kt) + coords[sin_index(k, comp)] * std::sin(kt);
        }
        out[comp] = v;
    }
    return out;
}

namespace {

void require_modes(std::size_t modes) {
    if (modes < 1) throw std::invalid_argument("Fourier problems need at least one mode");
}

}  // namespace

Problem fourier_problem_scalar(std::size_t modes) {
    require_modes(modes);
    const FourierBasis basis{modes, 1};
    const std::size_t n = basis.dim();
    Vector sin_t(n, 0.0);
    sin_t[basis.sin_index(1)] = 1.0;
    return Problem(basis.derivative_block(), DenseMatrix::identity(n), NonlinearMap::constant(std::move(sin_t)),
                   GramMetric::diagonal(basis.h1_weights()), GramMetric::diagonal(basis.l2_weights()),
                   "ex42(M=" + std::to_string(modes) + ")");
}

Problem fourier_problem_system(std::size_t modes) {
    require_modes(modes);
    const FourierBasis basis{modes, 2};
    const std::size_t b = basis.block_size();
    const std::size_t n = basis.dim();
    const DenseMatrix d = basis.derivative_block();

    DenseMatrix l(n, n);
    DenseMatrix c(n, n);
    for (std::size_t i = 0; i < b; ++i) {
        for (std::size_t j = 0; j < b; ++j) {
            l(i, j) = d(i, j);
            l(b + i, b + j) = d(i, j);
        }
        l(i, i) += 1.0;
        l(b + i, b + i) -= 1.0;
        c(i, b + i) = 1.0;   // first output component: x2
        c(b + i, i) = -1.0;  // second output component: -x1
    }
    return Problem(std::move(l), std::move(c), NonlinearMap::linear(-1.0 * DenseMatrix::identity(n)),
                   GramMetric::diagonal(basis.h1_weights()), GramMetric::diagonal(basis.l2_weights()),
                   "ex43(M=" + std::to_string(modes) + ")");
}

}  // namespace eigbranch
