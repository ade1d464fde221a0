#include "eigbranch/scan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_map>

namespace eigbranch {

namespace {

constexpr double kLinearityTol = 1e-10;

double gram_norm(const DenseMatrix& w, std::span<const double> x) {
    return std::sqrt(std::max(0.0, dot(x, w * x)));
}

double relative_defect(std::span<const double> lhs, std::span<const double> rhs, double scale) {
    return norm2(difference(lhs, rhs)) / (1.0 + scale);
}

}  // namespace

Pencil extract_pencil(const Problem& p) {
    const std::size_t d = p.dim();
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> normal;
    auto random_vector = [&] {
        Vector v(d);
        for (auto& e : v) e = normal(rng);
        return v;
    };
    const Vector n0 = p.eval_n(Vector(d, 0.0));
    bool linear = true;
    bool affine = true;
    for (int probe = 0; probe < 4; ++probe) {
        const Vector x = random_vector();
        const Vector y = random_vector();
        const Vector nx = p.eval_n(x);
        const Vector ny = p.eval_n(y);
        const Vector nxy = p.eval_n(axpy(1.0, x, y));
        const Vector n2x = p.eval_n(scaled(x, 2.0));
        const double scale = norm2(nx) + norm2(ny);
        const Vector sum = axpy(1.0, nx, ny);
        if (relative_defect(nxy, sum, scale) > kLinearityTol || relative_defect(n2x, scaled(nx, 2.0), scale) > kLinearityTol)
            linear = false;
        if (relative_defect(nxy, difference(sum, n0), scale) > kLinearityTol ||
            relative_defect(n2x, axpy(-1.0, n0, scaled(nx, 2.0)), scale) > kLinearityTol)
            affine = false;
    }
    if (!linear && !affine)
        throw UnsupportedOperation("eigenpair scan needs a linear (or affine) N; " + p.label() + " has neither");

    Pencil pencil;
    pencil.kind = linear ? PencilKind::Linear : PencilKind::Affine;
    pencil.l = p.l_matrix();
    pencil.c = p.c_matrix();
    pencil.gram_g = p.gram_g().matrix();
    pencil.n_linear = DenseMatrix(d, d);
    for (std::size_t j = 0; j < d; ++j) {
        Vector e(d, 0.0);
        e[j] = 1.0;
        const Vector col = difference(p.eval_n(e), linear ? Vector(d, 0.0) : n0);
        pencil.n_linear.set_column(j, col);
    }
    pencil.n_constant = linear ? Vector(d, 0.0) : n0;
    return pencil;
}

FieldSample eigenpair_field_at(const Pencil& pencil, double eps, double lambda) {
    FieldSample out;
    if (pencil.kind == PencilKind::Linear) {
        const DenseMatrix m = pencil.l + eps * pencil.n_linear - lambda * pencil.c;
        const SvdResult s = svd(m);
        out.sigma_max = s.singular.front();
        out.sigma_min = s.singular.back();
        out.value = determinant_sign(m) >= 0 ? out.sigma_min : -out.sigma_min;
        return out;
    }
    const DenseMatrix m = pencil.l + eps * pencil.n_linear - lambda * pencil.c;
    const SvdResult s = svd(m);
    out.sigma_max = s.singular.front();
    out.sigma_min = s.singular.back();
    out.degenerate = determinant_sign(m) >= 0 ? out.sigma_min : -out.sigma_min;
    const auto ls = least_squares(m, pencil.n_constant);
    if (ls.residual_norm > 1e-8 * (1.0 + norm2(pencil.n_constant))) {
        out.value = 1.0;
        return out;
    }
    out.value = std::abs(eps) * gram_norm(pencil.gram_g, ls.minimizer) - 1.0;
    return out;
}

double degenerate_solution_norm(const Pencil& pencil, double eps, double lambda) {
    const DenseMatrix m = pencil.l + eps * pencil.n_linear - lambda * pencil.c;
    const SvdResult s = svd(m);
    const std::size_t k = s.singular.size() - 1;
    const double scale = 1.0 + norm2(pencil.n_constant);
    // drop the smallest singular triple: on the singular set it spans the kernel
    if (std::abs(dot(s.left.column(k), pencil.n_constant)) > 1e-6 * scale)
        return std::numeric_limits<double>::infinity();
    Vector p(m.cols(), 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        if (s.singular[i] <= kDefaultRankTol * s.singular.front()) break;
        const double coef = -eps * dot(s.left.column(i), pencil.n_constant) / s.singular[i];
        p = axpy(coef, s.right.column(i), p);
    }
    // gram_g-orthogonal to the kernel direction: the shortest solution
    const Vector v = s.right.column(k);
    const Vector gv = pencil.gram_g * v;
    const double vv = dot(v, gv);
    if (vv > 0) p = axpy(-dot(p, gv) / vv, v, p);
    return gram_norm(pencil.gram_g, p);
}

double ScalarField::eps_at(std::size_t i) const {
    return window.eps_min + (window.eps_max - window.eps_min) * static_cast<double>(i) / grid.eps_cells;
}

double ScalarField::lambda_at(std::size_t j) const {
    return window.lambda_min + (window.lambda_max - window.lambda_min) * static_cast<double>(j) / grid.lambda_cells;
}

namespace {

ScalarField empty_field(const ScanWindow& w, const ScanGrid& g) {
    if (g.eps_cells < 16 || g.lambda_cells < 16) throw std::invalid_argument("eigenpair scan: grid must be at least 16x16");
    if (!(w.eps_max > w.eps_min) || !(w.lambda_max > w.lambda_min))
        throw std::invalid_argument("eigenpair scan: empty window");
    ScalarField f{w, g, {}};
    f.samples.resize(f.nodes_eps() * f.nodes_lambda());
    return f;
}

}  // namespace

ScalarField eigenpair_field_serial(const Pencil& pencil, const ScanWindow& w, const ScanGrid& g) {
    ScalarField f = empty_field(w, g);
    const std::size_t ni = f.nodes_eps();
    const std::size_t nj = f.nodes_lambda();
    for (std::size_t j = 0; j < nj; ++j)
        for (std::size_t i = 0; i < ni; ++i) f.samples[j * ni + i] = eigenpair_field_at(pencil, f.eps_at(i), f.lambda_at(j));
    return f;
}

ScalarField eigenpair_field_parallel(const Pencil& pencil, const ScanWindow& w, const ScanGrid& g) {
    ScalarField f = empty_field(w, g);
    const std::ptrdiff_t ni = static_cast<std::ptrdiff_t>(f.nodes_eps());
    const std::ptrdiff_t nj = static_cast<std::ptrdiff_t>(f.nodes_lambda());
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t j = 0; j < nj; ++j) {
        const double lambda = f.lambda_at(static_cast<std::size_t>(j));
        for (std::ptrdiff_t i = 0; i < ni; ++i)
            f.samples[static_cast<std::size_t>(j * ni + i)] =
                eigenpair_field_at(pencil, f.eps_at(static_cast<std::size_t>(i)), lambda);
    }
    return f;
}

// ---------------------------------------------------------------------------
// Marching squares

namespace {

struct Segment {
    std::size_t edge_a;
    std::size_t edge_b;
};

}  // namespace

std::vector<Polyline> marching_squares(const ScalarField& field, FieldChannel channel) {
    const std::size_t ni = field.nodes_eps();
    const std::size_t nj = field.nodes_lambda();
    auto value = [&](std::size_t i, std::size_t j) {
        return channel == FieldChannel::Value ? field.at(i, j).value : field.at(i, j).degenerate;
    };
    auto h_edge = [ni](std::size_t i, std::size_t j) { return 2 * (j * ni + i); };
    auto v_edge = [ni](std::size_t i, std::size_t j) { return 2 * (j * ni + i) + 1; };

    std::unordered_map<std::size_t, Vertex> crossing;
    auto edge_point = [&](std::size_t id) -> const Vertex& {
        auto it = crossing.find(id);
        if (it != crossing.end()) return it->second;
        const std::size_t node = id / 2;
        const std::size_t i = node % ni;
        const std::size_t j = node / ni;
        const bool horizontal = (id % 2) == 0;
        const std::size_t i2 = horizontal ? i + 1 : i;
        const std::size_t j2 = horizontal ? j : j + 1;
        const double v1 = value(i, j);
        const double v2 = value(i2, j2);
        const double t = v1 / (v1 - v2);
        Vertex p{field.eps_at(i) + t * (field.eps_at(i2) - field.eps_at(i)),
                 field.lambda_at(j) + t * (field.lambda_at(j2) - field.lambda_at(j))};
        return crossing.emplace(id, p).first->second;
    };

    std::vector<Segment> segments;
    for (std::size_t j = 0; j + 1 < nj; ++j) {
        for (std::size_t i = 0; i + 1 < ni; ++i) {
            const double c[4] = {value(i, j), value(i + 1, j), value(i + 1, j + 1), value(i, j + 1)};
            const bool in[4] = {c[0] > 0, c[1] > 0, c[2] > 0, c[3] > 0};
            // edges counterclockwise: bottom, right, top, left
            const std::size_t e[4] = {h_edge(i, j), v_edge(i + 1, j), h_edge(i, j + 1), v_edge(i, j)};
            std::vector<int> cut;
            for (int k = 0; k < 4; ++k)
                if (in[k] != in[(k + 1) % 4]) cut.push_back(k);
            if (cut.empty()) continue;
            if (cut.size() == 2) {
                segments.push_back({e[cut[0]], e[cut[1]]});
                continue;
            }
            // saddle: decide by the cell-center average
            const bool center_in = (c[0] + c[1] + c[2] + c[3]) > 0;
            if (center_in == in[0]) {
                segments.push_back({e[0], e[1]});  // isolate corner 1
                segments.push_back({e[2], e[3]});  // isolate corner 3
            } else {
                segments.push_back({e[3], e[0]});  // isolate corner 0
                segments.push_back({e[1], e[2]});  // isolate corner 2
            }
        }
    }

    std::unordered_map<std::size_t, std::vector<std::size_t>> by_edge;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        by_edge[segments[s].edge_a].push_back(s);
        by_edge[segments[s].edge_b].push_back(s);
    }
    std::vector<bool> used(segments.size(), false);

    auto walk = [&](std::size_t first_seg, std::size_t start_edge) {
        Polyline line;
        std::size_t edge = start_edge;
        std::size_t seg = first_seg;
        line.vertices.push_back(edge_point(edge));
        while (true) {
            used[seg] = true;
            edge = segments[seg].edge_a == edge ? segments[seg].edge_b : segments[seg].edge_a;
            // a zero exactly on a node is shared by its two edges
            if (edge_point(edge) != line.vertices.back()) line.vertices.push_back(edge_point(edge));
            if (edge == start_edge) {
                line.closed = true;
                break;
            }
            std::size_t next = segments.size();
            for (std::size_t cand : by_edge[edge])
                if (!used[cand]) next = cand;
            if (next == segments.size()) break;
            seg = next;
        }
        return line;
    };

    std::vector<Polyline> lines;
    // open chains start at edges touched by a single segment (window boundary)
    for (std::size_t s = 0; s < segments.size(); ++s) {
        if (used[s]) continue;
        for (std::size_t edge : {segments[s].edge_a, segments[s].edge_b}) {
            if (by_edge[edge].size() == 1 && !used[s]) lines.push_back(walk(s, edge));
        }
    }
    for (std::size_t s = 0; s < segments.size(); ++s)
        if (!used[s]) lines.push_back(walk(s, segments[s].edge_a));
    return lines;
}

// ---------------------------------------------------------------------------

namespace {

// Compass search on sigma_min / sigma_max, confined to +-2 cells around the start.
Vertex refine_minimum(const Pencil& pencil, Vertex start, double de, double dl, double& rel_out) {
    auto rel = [&](const Vertex& v) {
        const FieldSample s = eigenpair_field_at(pencil, v[0], v[1]);
        return s.sigma_max > 0 ? s.sigma_min / s.sigma_max : 0.0;
    };
    Vertex best = start;
    double f = rel(best);
    double se = de;
    double sl = dl;
    for (int it = 0; it < 400 && (se > 1e-15 * (1 + std::abs(best[0])) || sl > 1e-15 * (1 + std::abs(best[1]))); ++it) {
        bool moved = false;
        const Vertex trial[4] = {{best[0] + se, best[1]}, {best[0] - se, best[1]}, {best[0], best[1] + sl},
                                 {best[0], best[1] - sl}};
        for (const auto& t : trial) {
            if (std::abs(t[0] - start[0]) > 2 * de || std::abs(t[1] - start[1]) > 2 * dl) continue;
            const double ft = rel(t);
            if (ft < f) {
                f = ft;
                best = t;
                moved = true;
                break;
            }
        }
        if (!moved) {
            se *= 0.5;
            sl *= 0.5;
        }
    }
    rel_out = f;
    return best;
}

std::vector<Vertex> isolated_points(const Pencil& pencil, const ScalarField& field, double rel_tol) {
    const std::size_t ni = field.nodes_eps();
    const std::size_t nj = field.nodes_lambda();
    // nodes touching a cell with a sign change belong to a contour
    std::vector<bool> near_contour(ni * nj, false);
    for (std::size_t j = 0; j + 1 < nj; ++j)
        for (std::size_t i = 0; i + 1 < ni; ++i) {
            const bool s0 = field.at(i, j).value > 0;
            const bool mixed = (field.at(i + 1, j).value > 0) != s0 || (field.at(i, j + 1).value > 0) != s0 ||
                               (field.at(i + 1, j + 1).value > 0) != s0;
            if (!mixed) continue;
            for (std::size_t dj = 0; dj <= 1; ++dj)
                for (std::size_t di = 0; di <= 1; ++di) near_contour[(j + dj) * ni + i + di] = true;
        }

    std::vector<Vertex> out;
    const double de = field.cell_eps();
    const double dl = field.cell_lambda();
    for (std::size_t j = 1; j + 1 < nj; ++j) {
        for (std::size_t i = 1; i + 1 < ni; ++i) {
            if (near_contour[j * ni + i]) continue;
            const double v = field.at(i, j).sigma_min;
            bool is_min = true;
            for (int dj = -1; dj <= 1 && is_min; ++dj)
                for (int di = -1; di <= 1; ++di) {
                    if (di == 0 && dj == 0) continue;
                    if (field.at(i + di, j + dj).sigma_min < v) {
                        is_min = false;
                        break;
                    }
                }
            if (!is_min) continue;
            double rel = 1.0;
            const Vertex p = refine_minimum(pencil, {field.eps_at(i), field.lambda_at(j)}, de, dl, rel);
            if (rel > rel_tol) continue;
            const bool dup = std::any_of(out.begin(), out.end(), [&](const Vertex& q) {
                return std::abs(q[0] - p[0]) <= de && std::abs(q[1] - p[1]) <= dl;
            });
            if (!dup) out.push_back(p);
        }
    }
    return out;
}

// Keeps the parts of singular-set polylines that carry a unit solution; run
// ends are moved onto the boundary |eps| * norm = 1 by bisection.
std::vector<Polyline> clip_degenerate(const Pencil& pencil, const std::vector<Polyline>& lines) {
    auto inside = [&](const Vertex& v) { return degenerate_solution_norm(pencil, v[0], v[1]) * std::abs(v[0]) <= 1.0; };
    auto boundary = [&](Vertex good, Vertex bad) {
        for (int it = 0; it < 50; ++it) {
            const Vertex mid{0.5 * (good[0] + bad[0]), 0.5 * (good[1] + bad[1])};
            (inside(mid) ? good : bad) = mid;
        }
        return good;
    };
    std::vector<Polyline> out;
    for (const auto& line : lines) {
        const auto& v = line.vertices;
        std::vector<bool> in(v.size());
        for (std::size_t k = 0; k < v.size(); ++k) in[k] = inside(v[k]);
        if (std::all_of(in.begin(), in.end(), [](bool b) { return b; })) {
            out.push_back(line);
            continue;
        }
        Polyline run;
        for (std::size_t k = 0; k < v.size(); ++k) {
            if (in[k]) {
                if (run.vertices.empty() && k > 0) run.vertices.push_back(boundary(v[k], v[k - 1]));
                run.vertices.push_back(v[k]);
            } else if (!run.vertices.empty()) {
                run.vertices.push_back(boundary(v[k - 1], v[k]));
                if (run.vertices.size() >= 2) out.push_back(run);
                run = {};
            }
        }
        if (run.vertices.size() >= 2) out.push_back(run);
    }
    return out;
}

}  // namespace

ScanResult eigenpair_scan(const Problem& p, const ScanWindow& w, const ScanGrid& g, const ScanOptions& opt) {
    const Pencil pencil = extract_pencil(p);
    ScanResult r;
    r.field = opt.parallel ? eigenpair_field_parallel(pencil, w, g) : eigenpair_field_serial(pencil, w, g);
    r.polylines = marching_squares(r.field);
    if (pencil.kind == PencilKind::Linear) {
        r.isolated = isolated_points(pencil, r.field, opt.isolated_rel_tol);
    } else {
        for (auto& line : clip_degenerate(pencil, marching_squares(r.field, FieldChannel::Degenerate)))
            r.polylines.push_back(std::move(line));
    }
    return r;
}

}  // namespace eigbranch
