#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace eigbranch {

using Vector = std::vector<double>;

/// Raised when an iterative numerical kernel gives up (SVD sweeps, Newton).
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Dense row-major matrix. Problem sizes here stay in the tens, so no
/// expression templates and no sparse storage.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    DenseMatrix(std::size_t rows, std::size_t cols, Vector entries);
    DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static DenseMatrix identity(std::size_t n);
    static DenseMatrix from_rows(const std::vector<Vector>& rows);
    static DenseMatrix from_columns(const std::vector<Vector>& cols);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const double> entries() const { return data_; }
    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    Vector column(std::size_t j) const;
    void set_column(std::size_t j, std::span<const double> v);

    DenseMatrix transpose() const;
    bool all_finite() const;
    double max_abs() const;

    DenseMatrix& operator+=(const DenseMatrix& o);
    DenseMatrix& operator-=(const DenseMatrix& o);
    DenseMatrix& operator*=(double s);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Vector data_;
};

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator*(double s, DenseMatrix a);
DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
Vector operator*(const DenseMatrix& a, std::span<const double> x);

// Small vector helpers.
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double max_abs(std::span<const double> a);
Vector axpy(double alpha, std::span<const double> x, std::span<const double> y);  // alpha*x + y
Vector scaled(std::span<const double> x, double s);
Vector difference(std::span<const double> a, std::span<const double> b);

/// Symmetric positive-definite matrix realizing an inner product in basis
/// coordinates. Construction rejects non-symmetric or non-PD input.
class GramMetric {
public:
    explicit GramMetric(DenseMatrix w);
    static GramMetric identity(std::size_t n);
    static GramMetric diagonal(std::span<const double> weights);

    const DenseMatrix& matrix() const { return w_; }
    std::size_t dim() const { return w_.rows(); }

    Vector apply(std::span<const double> x) const { return w_ * x; }
    double norm(std::span<const double> x) const;

private:
    DenseMatrix w_;
};

double gram_inner(const GramMetric& w, std::span<const double> x, std::span<const double> y);

struct SvdResult {
    DenseMatrix left;    // rows x k, k = min(rows, cols)
    Vector singular;     // k values, descending
    DenseMatrix right;   // cols x cols, full orthonormal basis; trailing cols - k columns span the implicit null directions
};

inline constexpr double kDefaultRankTol = 1e-8;

SvdResult svd(const DenseMatrix& m);

/// Right singular vectors with sigma_i <= rel_tol * sigma_max, plus every
/// direction beyond min(rows, cols). For the zero matrix this is the
/// standard basis.
std::vector<Vector> kernel_basis(const DenseMatrix& m, double rel_tol = kDefaultRankTol);

struct LeastSquaresResult {
    Vector minimizer;
    double residual_norm = 0.0;
};

/// Minimum-norm least squares via the truncated SVD pseudo-inverse.
LeastSquaresResult least_squares(const DenseMatrix& a, std::span<const double> b,
                                 double rel_tol = kDefaultRankTol);

/// k smallest singular values, ascending.
Vector min_singular_values(const DenseMatrix& m, std::size_t k);

/// Sign of det(m) (+1, -1, or 0) by partially pivoted LU. Square input only.
int determinant_sign(const DenseMatrix& m);
double determinant(const DenseMatrix& m);

/// Extends an orthonormal family in R^n to a full orthonormal basis.
std::vector<Vector> complete_orthonormal(std::vector<Vector> basis, std::size_t n);

}  // namespace eigbranch
