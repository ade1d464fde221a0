#pragma once

#include <stdexcept>
#include <string>

#include "eigbranch/problem.hpp"

namespace eigbranch {

class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class SimplicityVerdict { Simple, NotSimpleKernelDim, NotSimpleCxZero, NotSimpleSolvable };

std::string to_string(SimplicityVerdict v);

struct SimplicityTolerances {
    double rank = 1e-8;
    double alignment = 1e-8;
    double c_zero = 1e-10;
    double solvable = 1e-6;
    double margin = 1e-8;
    double residual = 1e-8;  // precondition: (x*, 0, lambda*) must solve the problem
};

struct SimplicityReport {
    std::size_t kernel_dim = 0;
    double kernel_alignment = 0.0;  // |cos| between kernel vector and x*; 0 unless kernel_dim == 1
    double c_xstar_norm = 0.0;
    double ls_residual = 0.0;
    double dpsi_margin = 0.0;
    SimplicityVerdict verdict = SimplicityVerdict::NotSimpleKernelDim;
    SimplicityTolerances tolerances;

    bool simple() const { return verdict == SimplicityVerdict::Simple; }
};

/// Checks, in order: Ker(L - lambda* C) = R x*, C x* != 0, and that
/// A x = C x* has no solution. The last condition stands in for the
/// complement condition Im A + C(Ker A) = H, which it is equivalent to
/// when A is index-zero Fredholm with one-dimensional kernel.
SimplicityReport check_simple(const Problem& p, std::span<const double> x_star, double lambda_star,
                              const SimplicityTolerances& tols = {});

/// Smallest singular value of [A T | -C x*], T a gram_g-orthonormal basis of
/// the gram_g-orthogonal complement of x*. Zero exactly when the local map
/// (x, lambda) -> L x - lambda C x fails to be a diffeomorphism near (x*, lambda*).
double dpsi_min_singular(const Problem& p, std::span<const double> x_star, double lambda_star);

}  // namespace eigbranch
