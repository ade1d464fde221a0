#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "eigbranch/problem.hpp"

namespace eigbranch {

class UnsupportedOperation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ScanWindow {
    double eps_min = -2.0;
    double eps_max = 2.0;
    double lambda_min = -2.0;
    double lambda_max = 2.0;
};

/// Cell counts per axis; the field is sampled on (cells + 1) nodes per axis.
struct ScanGrid {
    std::size_t eps_cells = 256;
    std::size_t lambda_cells = 256;
};

/// N classified by probing: linear (N(x+y) = N(x) + N(y)), affine
/// (N(x) - N(0) linear, N(0) != 0), or neither.
enum class PencilKind { Linear, Affine };

/// L + eps N1 - lambda C together with the constant part N0 of an affine N.
struct Pencil {
    PencilKind kind = PencilKind::Linear;
    DenseMatrix l;
    DenseMatrix n_linear;
    DenseMatrix c;
    Vector n_constant;
    DenseMatrix gram_g;
};

/// Throws UnsupportedOperation when N is neither linear nor affine.
Pencil extract_pencil(const Problem& p);

/// Signed scalar whose zero set is the eigenpair set.
/// Linear: sign(det M) * sigma_min(M), M = L + eps N - lambda C.
/// Affine: |eps| * |M^+ N0|_G - 1 (hyperbola-type branches); `degenerate`
/// carries sign(det M) * sigma_min(M), whose zero lines hold the segment-type
/// branches where M itself is singular.
struct FieldSample {
    double value = 0.0;
    double degenerate = 0.0;
    double sigma_min = 0.0;
    double sigma_max = 0.0;
};
FieldSample eigenpair_field_at(const Pencil& pencil, double eps, double lambda);

/// Node values, row-major over lambda (rows) then eps (columns).
struct ScalarField {
    ScanWindow window;
    ScanGrid grid;
    std::vector<FieldSample> samples;

    std::size_t nodes_eps() const { return grid.eps_cells + 1; }
    std::size_t nodes_lambda() const { return grid.lambda_cells + 1; }
    double eps_at(std::size_t i) const;
    double lambda_at(std::size_t j) const;
    const FieldSample& at(std::size_t i, std::size_t j) const { return samples[j * nodes_eps() + i]; }
    double cell_eps() const { return (window.eps_max - window.eps_min) / grid.eps_cells; }
    double cell_lambda() const { return (window.lambda_max - window.lambda_min) / grid.lambda_cells; }
};

/// Reference implementation: one node at a time.
ScalarField eigenpair_field_serial(const Pencil& pencil, const ScanWindow& w, const ScanGrid& g);
/// OpenMP over lambda rows; bitwise identical to the serial result.
ScalarField eigenpair_field_parallel(const Pencil& pencil, const ScanWindow& w, const ScanGrid& g);

using Vertex = std::array<double, 2>;  // (eps, lambda)

struct Polyline {
    std::vector<Vertex> vertices;
    bool closed = false;
};

enum class FieldChannel { Value, Degenerate };

/// Zero contours of the field by marching squares, stitched into polylines.
std::vector<Polyline> marching_squares(const ScalarField& field, FieldChannel channel = FieldChannel::Value);

/// Affine N only: on the singular set of M = L + eps N1 - lambda C, the
/// smallest gram_g norm of a solution of M x = -eps N0 (x free along the
/// near-kernel direction). Infinite when eps N0 leaves the range of M.
double degenerate_solution_norm(const Pencil& pencil, double eps, double lambda);

struct ScanResult {
    std::vector<Polyline> polylines;
    /// Isolated eigenpairs: local minima of sigma_min away from any contour,
    /// refined until sigma_min <= 1e-7 sigma_max.
    std::vector<Vertex> isolated;
    ScalarField field;
};

struct ScanOptions {
    bool parallel = true;
    double isolated_rel_tol = 1e-7;
};

ScanResult eigenpair_scan(const Problem& p, const ScanWindow& w, const ScanGrid& g, const ScanOptions& opt = {});

}  // namespace eigbranch
