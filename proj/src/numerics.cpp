#include "eigbranch/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace eigbranch {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, Vector entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows * cols) {
        throw DimensionError("DenseMatrix: entry count " + std::to_string(data_.size()) +
                             " does not match " + std::to_string(rows) + "x" + std::to_string(cols));
    }
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw DimensionError("DenseMatrix: ragged row list");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::from_rows(const std::vector<Vector>& rows) {
    const std::size_t nr = rows.size();
    const std::size_t nc = nr ? rows.front().size() : 0;
    DenseMatrix m(nr, nc);
    for (std::size_t i = 0; i < nr; ++i) {
        if (rows[i].size() != nc) throw DimensionError("DenseMatrix::from_rows: ragged rows");
        std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    }
    return m;
}

DenseMatrix DenseMatrix::from_columns(const std::vector<Vector>& cols) {
    const std::size_t nc = cols.size();
    const std::size_t nr = nc ? cols.front().size() : 0;
    DenseMatrix m(nr, nc);
    for (std::size_t j = 0; j < nc; ++j) {
        if (cols[j].size() != nr) throw DimensionError("DenseMatrix::from_columns: ragged columns");
        m.set_column(j, cols[j]);
    }
    return m;
}

Vector DenseMatrix::column(std::size_t j) const {
    Vector c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
}

void DenseMatrix::set_column(std::size_t j, std::span<const double> v) {
    if (v.size() != rows_) throw DimensionError("DenseMatrix::set_column: length mismatch");
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

DenseMatrix DenseMatrix::transpose() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

bool DenseMatrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double DenseMatrix::max_abs() const { return eigbranch::max_abs(data_); }

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& o) {
    if (o.rows_ != rows_ || o.cols_ != cols_) throw DimensionError("DenseMatrix +=: shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& o) {
    if (o.rows_ != rows_ || o.cols_ != cols_) throw DimensionError("DenseMatrix -=: shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
}

DenseMatrix& DenseMatrix::operator*=(double s) {
    for (auto& v : data_) v *= s;
    return *this;
}

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
DenseMatrix operator*(double s, DenseMatrix a) { return a *= s; }

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw DimensionError("DenseMatrix *: inner dimension mismatch");
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

Vector operator*(const DenseMatrix& a, std::span<const double> x) {
    if (a.cols() != x.size()) throw DimensionError("DenseMatrix * vector: dimension mismatch");
    Vector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
    return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) {
    // scaled to avoid overflow on the occasional huge Newton iterate
    double scale = max_abs(a);
    if (scale == 0.0 || !std::isfinite(scale)) return scale;
    double s = 0.0;
    for (double v : a) s += (v / scale) * (v / scale);
    return scale * std::sqrt(s);
}

double max_abs(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) {
        if (std::isnan(v)) return v;
        m = std::max(m, std::abs(v));
    }
    return m;
}

Vector axpy(double alpha, std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DimensionError("axpy: length mismatch");
    Vector r(y.begin(), y.end());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += alpha * x[i];
    return r;
}

Vector scaled(std::span<const double> x, double s) {
    Vector r(x.begin(), x.end());
    for (auto& v : r) v *= s;
    return r;
}

Vector difference(std::span<const double> a, std::span<const double> b) { return axpy(-1.0, b, a); }

// ---------------------------------------------------------------------------
// Gram metrics

GramMetric::GramMetric(DenseMatrix w) : w_(std::move(w)) {
    if (!w_.square()) throw DimensionError("GramMetric: matrix must be square");
    if (!w_.all_finite()) throw DimensionError("GramMetric: non-finite entries");
    const std::size_t n = w_.rows();
    const double scale = std::max(1.0, w_.max_abs());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(w_(i, j) - w_(j, i)) > 1e-12 * scale)
                throw DimensionError("GramMetric: matrix is not symmetric");
    // Cholesky succeeds iff the symmetric matrix is positive definite.
    DenseMatrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = w_(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0)) throw DimensionError("GramMetric: matrix is not positive definite");
        l(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = 0.5 * (w_(i, j) + w_(j, i));
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
}

GramMetric GramMetric::identity(std::size_t n) { return GramMetric(DenseMatrix::identity(n)); }

GramMetric GramMetric::diagonal(std::span<const double> weights) {
    DenseMatrix w(weights.size(), weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) w(i, i) = weights[i];
    return GramMetric(std::move(w));
}

double GramMetric::norm(std::span<const double> x) const { return std::sqrt(std::max(0.0, gram_inner(*this, x, x))); }

double gram_inner(const GramMetric& w, std::span<const double> x, std::span<const double> y) {
    if (x.size() != w.dim() || y.size() != w.dim()) throw DimensionError("gram_inner: dimension mismatch");
    return dot(x, w.matrix() * y);
}

// ---------------------------------------------------------------------------
// SVD: one-sided Jacobi (Hestenes) on the tall orientation.

namespace {

constexpr int kMaxSweeps = 80;

struct TallSvd {
    std::vector<Vector> u;  // n columns of length m (unnormalized until the end)
    Vector sigma;
    std::vector<Vector> v;  // n columns of length n
};

// a: m x n with m >= n, given as n columns.
TallSvd jacobi_tall(std::vector<Vector> cols) {
    const std::size_t n = cols.size();
    std::vector<Vector> v(n, Vector(n, 0.0));
    for (std::size_t j = 0; j < n; ++j) v[j][j] = 1.0;

    constexpr double tol = 4.0 * std::numeric_limits<double>::epsilon();
    bool converged = (n < 2);
    for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double alpha = dot(cols[p], cols[p]);
                const double beta = dot(cols[q], cols[q]);
                const double gamma = dot(cols[p], cols[q]);
                if (gamma == 0.0) continue;
                if (std::abs(gamma) <= tol * std::sqrt(alpha) * std::sqrt(beta)) continue;
                if (!std::isfinite(gamma)) throw NumericalFailure("svd: non-finite entries encountered");
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                auto rotate = [c, s](Vector& x, Vector& y) {
                    for (std::size_t k = 0; k < x.size(); ++k) {
                        const double xk = x[k];
                        const double yk = y[k];
                        x[k] = c * xk - s * yk;
                        y[k] = s * xk + c * yk;
                    }
                };
                rotate(cols[p], cols[q]);
                rotate(v[p], v[q]);
            }
        }
        converged = !rotated;
    }
    if (!converged) throw NumericalFailure("svd: one-sided Jacobi did not converge within the sweep cap");

    TallSvd out;
    out.sigma.resize(n);
    for (std::size_t j = 0; j < n; ++j) out.sigma[j] = norm2(cols[j]);
    out.u = std::move(cols);
    out.v = std::move(v);
    return out;
}

}  // namespace

std::vector<Vector> complete_orthonormal(std::vector<Vector> basis, std::size_t n) {
    std::vector<Vector> candidates;
    candidates.reserve(n);
    while (basis.size() < n) {
        // pick the standard direction with the largest orthogonal residual
        Vector best;
        double best_norm = -1.0;
        for (std::size_t e = 0; e < n; ++e) {
            Vector r(n, 0.0);
            r[e] = 1.0;
            for (int pass = 0; pass < 2; ++pass)
                for (const auto& b : basis) r = axpy(-dot(b, r), b, r);
            const double rn = norm2(r);
            if (rn > best_norm) {
                best_norm = rn;
                best = std::move(r);
            }
        }
        basis.push_back(scaled(best, 1.0 / best_norm));
    }
    return basis;
}

SvdResult svd(const DenseMatrix& m) {
    if (!m.all_finite()) throw NumericalFailure("svd: input has non-finite entries");
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    const std::size_t k = std::min(rows, cols);
    const bool wide = rows < cols;

    // Work on the tall orientation: columns of m, or columns of m^T.
    std::vector<Vector> work;
    if (!wide) {
        for (std::size_t j = 0; j < cols; ++j) work.push_back(m.column(j));
    } else {
        for (std::size_t i = 0; i < rows; ++i) work.emplace_back(m.row(i).begin(), m.row(i).end());
    }
    TallSvd t = jacobi_tall(std::move(work));

    std::vector<std::size_t> order(t.sigma.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return t.sigma[a] > t.sigma[b]; });

    // Normalized "u" columns of the tall problem; exact zeros get completed later.
    const std::size_t tall_len = wide ? cols : rows;
    std::vector<Vector> tall_u;
    Vector sigma;
    std::vector<Vector> tall_v;
    for (std::size_t idx : order) {
        sigma.push_back(t.sigma[idx]);
        tall_v.push_back(t.v[idx]);
        if (t.sigma[idx] > 0.0) tall_u.push_back(scaled(t.u[idx], 1.0 / t.sigma[idx]));
    }
    tall_u = complete_orthonormal(std::move(tall_u), tall_len);

    SvdResult r;
    r.singular = sigma;
    if (!wide) {
        // m = U S V^T with U = tall_u (first k), V = tall_v (cols x cols).
        r.left = DenseMatrix(rows, k);
        for (std::size_t j = 0; j < k; ++j) r.left.set_column(j, tall_u[j]);
        r.right = DenseMatrix::from_columns(tall_v);
    } else {
        // m^T = U' S V'^T, so m = V' S U'^T: left = V' (rows x rows), right = U' completed to cols x cols.
        r.left = DenseMatrix::from_columns(tall_v);
        r.right = DenseMatrix::from_columns(tall_u);
    }
    return r;
}

std::vector<Vector> kernel_basis(const DenseMatrix& m, double rel_tol) {
    if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw std::invalid_argument("kernel_basis: rel_tol must lie in (0, 1)");
    const SvdResult s = svd(m);
    const double smax = s.singular.empty() ? 0.0 : s.singular.front();
    std::vector<Vector> kernel;
    for (std::size_t j = 0; j < m.cols(); ++j) {
        const bool beyond = j >= s.singular.size();
        if (beyond || smax == 0.0 || s.singular[j] <= rel_tol * smax) kernel.push_back(s.right.column(j));
    }
    return kernel;
}

LeastSquaresResult least_squares(const DenseMatrix& a, std::span<const double> b, double rel_tol) {
    if (a.rows() != b.size()) throw DimensionError("least_squares: rows(a) != length(b)");
    const SvdResult s = svd(a);
    const double smax = s.singular.empty() ? 0.0 : s.singular.front();
    LeastSquaresResult r;
    r.minimizer.assign(a.cols(), 0.0);
    for (std::size_t j = 0; j < s.singular.size(); ++j) {
        const double sj = s.singular[j];
        if (smax == 0.0 || sj <= rel_tol * smax) break;
        double coef = 0.0;
        for (std::size_t i = 0; i < a.rows(); ++i) coef += s.left(i, j) * b[i];
        coef /= sj;
        for (std::size_t i = 0; i < a.cols(); ++i) r.minimizer[i] += coef * s.right(i, j);
    }
    r.residual_norm = norm2(difference(a * r.minimizer, b));
    return r;
}

Vector min_singular_values(const DenseMatrix& m, std::size_t k) {
    const std::size_t avail = std::min(m.rows(), m.cols());
    if (k > avail) throw DimensionError("min_singular_values: k exceeds min(rows, cols)");
    const SvdResult s = svd(m);
    Vector out(s.singular.rbegin(), s.singular.rbegin() + static_cast<std::ptrdiff_t>(k));
    return out;
}

namespace {

// LU with partial pivoting; returns (sign, log|det|) with sign 0 for exact singularity.
std::pair<int, double> lu_det(const DenseMatrix& m) {
    if (!m.square()) throw DimensionError("determinant: matrix must be square");
    DenseMatrix a = m;
    const std::size_t n = a.rows();
    int sign = 1;
    double logdet = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
        if (a(piv, c) == 0.0) return {0, -std::numeric_limits<double>::infinity()};
        if (piv != c) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(c, j), a(piv, j));
            sign = -sign;
        }
        const double d = a(c, c);
        if (d < 0) sign = -sign;
        logdet += std::log(std::abs(d));
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a(r, c) / d;
            if (f == 0.0) continue;
            for (std::size_t j = c; j < n; ++j) a(r, j) -= f * a(c, j);
        }
    }
    return {sign, logdet};
}

}  // namespace

int determinant_sign(const DenseMatrix& m) { return lu_det(m).first; }

double determinant(const DenseMatrix& m) {
    const auto [sign, logdet] = lu_det(m);
    return sign == 0 ? 0.0 : sign * std::exp(logdet);
}

}  // namespace eigbranch
