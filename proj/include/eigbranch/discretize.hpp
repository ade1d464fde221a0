#pragma once

#include "eigbranch/problem.hpp"

namespace eigbranch {

/// Trigonometric basis on [0, 2pi], per component ordered as
/// [1, cos t, sin t, cos 2t, sin 2t, ..., cos Mt, sin Mt].
struct FourierBasis {
    std::size_t modes = 1;
    std::size_t components = 1;

    std::size_t block_size() const { return 2 * modes + 1; }
    std::size_t dim() const { return components * block_size(); }

    /// Coordinate index of the constant / cos(kt) / sin(kt) function of one component.
    std::size_t constant_index(std::size_t component = 0) const { return component * block_size(); }
    std::size_t cos_index(std::size_t k, std::size_t component = 0) const;
    std::size_t sin_index(std::size_t k, std::size_t component = 0) const;

    /// d/dt on one component block.
    DenseMatrix derivative_block() const;
    /// H1 weights (1 for the constant, (1 + k^2)/2 per cos/sin pair), all components.
    Vector h1_weights() const;
    /// L2 weights (1, then 1/2 per trig function), all components.
    Vector l2_weights() const;

    /// Value of the represented function(s) at t.
    Vector evaluate(std::span<const double> coords, double t) const;
};

/// x'(t) + eps sin t = lambda x(t), periodic, normalized in H1.
Problem fourier_problem_scalar(std::size_t modes);

/// (x1' + x1, x2' - x2) + eps (-x1, -x2) = lambda (x2, -x1), periodic.
Problem fourier_problem_system(std::size_t modes);

}  // namespace eigbranch
