#include "eigbranch/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "eigbranch/simplicity.hpp"

namespace eigbranch {

void ContinuationSettings::validate() const {
    auto fail = [](const char* what) { throw std::invalid_argument(std::string("ContinuationSettings: ") + what); };
    if (!(h_min > 0.0 && h_min <= h0 && h0 <= h_max)) fail("need 0 < h_min <= h0 <= h_max");
    if (!(newton_tol > 0.0) || !(loop_tol > 0.0) || !(branch_point_tol > 0.0) || !(escape_radius > 0.0))
        fail("tolerances must be positive");
    if (!(rank_tol > 0.0 && rank_tol < 1.0)) fail("rank_tol must lie in (0, 1)");
    if (newton_max_iter < 1 || min_loop_steps < 1 || max_steps < 1) fail("iteration counts must be positive");
}

bool ContinuationSettings::set(const std::string& key, double value) {
    auto as_int = [value] { return static_cast<int>(std::lround(value)); };
    if (key == "h0") h0 = value;
    else if (key == "h_min") h_min = value;
    else if (key == "h_max") h_max = value;
    else if (key == "newton_tol") newton_tol = value;
    else if (key == "newton_max_iter") newton_max_iter = as_int();
    else if (key == "escape_radius" || key == "R_max") escape_radius = value;
    else if (key == "loop_tol") loop_tol = value;
    else if (key == "min_loop_steps") min_loop_steps = as_int();
    else if (key == "max_steps") max_steps = as_int();
    else if (key == "branch_point_tol") branch_point_tol = value;
    else if (key == "fd_step") fd_step = value;
    else if (key == "rank_tol") rank_tol = value;
    else return false;
    return true;
}

std::string to_string(EventKind k) {
    return k == EventKind::TrivialCrossing ? "TrivialCrossing" : "BranchPoint";
}

std::string to_string(Termination t) {
    switch (t) {
        case Termination::ClosedLoop: return "ClosedLoop";
        case Termination::Escaped: return "Escaped";
        case Termination::SingularStall: return "SingularStall";
        case Termination::MaxSteps: return "MaxSteps";
    }
    return "?";
}

std::vector<BranchEvent> Branch::events_of(EventKind k) const {
    std::vector<BranchEvent> out;
    std::copy_if(events.begin(), events.end(), std::back_inserter(out), [k](const auto& e) { return e.kind == k; });
    return out;
}

namespace {

// Newton steps use a much finer rank cut than kernel detection so that
// near-singular (but regular) systems still get a full step.
constexpr double kSolveRankTol = 1e-14;

double distance(const SolutionPoint& a, const SolutionPoint& b) {
    return norm2(difference(a.packed(), b.packed()));
}

double radius(const SolutionPoint& s) { return std::hypot(s.eps, s.lambda); }

DenseMatrix bordered(const DenseMatrix& j, std::span<const double> row) {
    DenseMatrix m(j.rows() + 1, j.cols());
    for (std::size_t r = 0; r < j.rows(); ++r) std::copy(j.row(r).begin(), j.row(r).end(), m.row(r).begin());
    std::copy(row.begin(), row.end(), m.row(j.rows()).begin());
    return m;
}

Vector oriented_kernel_vector(const DenseMatrix& j, std::span<const double> reference) {
    const SvdResult s = svd(j);
    Vector t = s.right.column(s.right.cols() - 1);
    if (dot(t, reference) < 0) t = scaled(t, -1.0);
    return t;
}

bool is_trivial(const SolutionPoint& s) { return std::abs(s.eps) <= kTrivialEpsTol; }

// Frozen-eps Newton in (x, lambda) on {Phi(x, 0, lambda) = 0, sphere = 0}.
std::optional<SolutionPoint> solve_trivial(const Problem& p, SolutionPoint s, const ContinuationSettings& cfg) {
    const std::size_t d = p.dim();
    s.eps = 0.0;
    for (int it = 0; it <= cfg.newton_max_iter + 4; ++it) {
        const Vector f = augmented_residual(p, s);
        if (!std::isfinite(norm2(f))) return std::nullopt;
        if (residual_norm(p, f) <= cfg.newton_tol) return s;
        const DenseMatrix full = jacobian(p, s, cfg.fd_step);
        DenseMatrix j(d + 1, d + 1);
        for (std::size_t r = 0; r <= d; ++r) {
            for (std::size_t c = 0; c < d; ++c) j(r, c) = full(r, c);
            j(r, d) = full(r, d + 1);
        }
        const Vector step = least_squares(j, scaled(f, -1.0), kSolveRankTol).minimizer;
        for (std::size_t i = 0; i < d; ++i) s.x[i] += step[i];
        s.lambda += step[d];
    }
    return std::nullopt;
}

struct AlongPoint {
    SolutionPoint point;
    Vector tangent;
};

// Solution near arclength offset sigma from a along t_a, guessed on the secant a -> b.
std::optional<AlongPoint> point_along(const Problem& p, const SolutionPoint& a, std::span<const double> t_a,
                                      const SolutionPoint& b, double sigma, const ContinuationSettings& cfg) {
    const Vector qa = a.packed();
    const Vector qb = b.packed();
    const double span_ab = dot(difference(qb, qa), t_a);
    const double frac = span_ab != 0.0 ? sigma / span_ab : 0.0;
    const Vector guess = axpy(frac, difference(qb, qa), qa);
    const Vector anchor = axpy(sigma, t_a, qa);
    try {
        const auto res = newton_correct(p, SolutionPoint::unpack(guess), anchor, t_a, cfg,
                                        std::max(2.0 * std::abs(span_ab), 1e-3));
        return AlongPoint{res.point, bordered_tangent(p, res.point, t_a, cfg)};
    } catch (const NumericalFailure&) {
        return std::nullopt;
    }
}

double eps_component(std::span<const double> t) { return t[t.size() - 2]; }

}  // namespace

SolutionPoint polish_point(const Problem& p, const SolutionPoint& s, const ContinuationSettings& cfg) {
    Vector q = s.packed();
    for (int it = 0; it <= cfg.newton_max_iter + 4; ++it) {
        const SolutionPoint cur = SolutionPoint::unpack(q);
        const Vector f = augmented_residual(p, cur);
        if (residual_norm(p, f) <= cfg.newton_tol) return cur;
        const Vector step = least_squares(jacobian(p, cur, cfg.fd_step), scaled(f, -1.0), kSolveRankTol).minimizer;
        q = axpy(1.0, step, q);
        if (!std::isfinite(norm2(q))) break;
    }
    throw CorrectionFailure("polish_point: start point could not be pulled onto the solution set");
}

Vector initial_tangent(const Problem& p, const SolutionPoint& s0, int orient, const ContinuationSettings& cfg) {
    if (orient != 1 && orient != -1) throw std::invalid_argument("initial_tangent: orient must be +1 or -1");
    const double res = residual_norm(p, augmented_residual(p, s0));
    if (!(res <= cfg.newton_tol)) throw std::invalid_argument("initial_tangent: start point is not a solution");

    bool simple_trivial = false;
    if (is_trivial(s0)) {
        SimplicityTolerances tols;
        tols.rank = cfg.rank_tol;
        const SimplicityReport rep = check_simple(p, s0.x, s0.lambda, tols);
        if (!rep.simple())
            throw SingularStart("start is a trivial solution that is not simple (" + to_string(rep.verdict) + ")");
        simple_trivial = true;
    }

    const DenseMatrix j = jacobian(p, s0, cfg.fd_step);
    const std::vector<Vector> kernel = kernel_basis(j, cfg.rank_tol);
    if (kernel.size() != 1)
        throw SingularStart("augmented Jacobian has a " + std::to_string(kernel.size()) +
                            "-dimensional kernel at the start point");
    Vector t = scaled(kernel.front(), 1.0 / norm2(kernel.front()));
    const std::size_t d = p.dim();
    double key = t[d];
    if (std::abs(key) < cfg.branch_point_tol) {
        if (simple_trivial) throw SingularStart("branch is not transversal to eps = 0 at a simple trivial solution");
        key = t[d + 1];
        if (std::abs(key) < cfg.branch_point_tol) {
            // orient by the largest component
            std::size_t imax = 0;
            for (std::size_t i = 1; i < t.size(); ++i)
                if (std::abs(t[i]) > std::abs(t[imax])) imax = i;
            key = t[imax];
        }
    }
    if (key * orient < 0) t = scaled(t, -1.0);
    return t;
}

CorrectionResult newton_correct(const Problem& p, const SolutionPoint& guess, std::span<const double> anchor,
                                std::span<const double> normal, const ContinuationSettings& cfg, double max_distance) {
    const std::size_t n = p.dim() + 2;
    if (anchor.size() != n || normal.size() != n) throw DimensionError("newton_correct: constraint has the wrong size");
    const Vector start = guess.packed();
    Vector q = start;
    for (int it = 0; it <= cfg.newton_max_iter; ++it) {
        const SolutionPoint s = SolutionPoint::unpack(q);
        Vector f = augmented_residual(p, s);
        const double plane = dot(normal, difference(q, anchor));
        const double r = std::hypot(residual_norm(p, f), plane);
        if (!std::isfinite(r)) break;
        if (r <= cfg.newton_tol) return {s, it};
        if (it == cfg.newton_max_iter) break;
        f.push_back(plane);
        const DenseMatrix m = bordered(jacobian(p, s, cfg.fd_step), normal);
        const Vector step = least_squares(m, scaled(f, -1.0), kSolveRankTol).minimizer;
        q = axpy(1.0, step, q);
        if (norm2(difference(q, start)) > max_distance) break;
    }
    throw CorrectionFailure("newton_correct: no convergence");
}

Vector bordered_tangent(const Problem& p, const SolutionPoint& s, std::span<const double> previous,
                        const ContinuationSettings& cfg) {
    const DenseMatrix j = jacobian(p, s, cfg.fd_step);
    const DenseMatrix m = bordered(j, previous);
    Vector rhs(m.rows(), 0.0);
    rhs.back() = 1.0;
    const auto ls = least_squares(m, rhs, kSolveRankTol);
    const double nrm = norm2(ls.minimizer);
    if (!(nrm > 0.0) || !std::isfinite(nrm) || ls.residual_norm > 1e-6) return oriented_kernel_vector(j, previous);
    return scaled(ls.minimizer, 1.0 / nrm);
}

CrossingResult locate_trivial_crossing(const Problem& p, const SolutionPoint& a, const SolutionPoint& b,
                                       const ContinuationSettings& cfg) {
    if (a.eps == 0.0 && distance(a, b) == 0.0) return {a, false};
    const Vector qa = a.packed();
    const Vector qb = b.packed();
    const double denom = a.eps - b.eps;
    const double frac = denom != 0.0 ? std::clamp(a.eps / denom, 0.0, 1.0) : 0.0;
    SolutionPoint guess = SolutionPoint::unpack(axpy(frac, difference(qb, qa), qa));
    guess.eps = 0.0;
    if (auto s = solve_trivial(p, guess, cfg)) return {*s, false};
    return {guess, true};
}

double branch_test_function(const Problem& p, const SolutionPoint& s, std::span<const double> t,
                            const ContinuationSettings& cfg) {
    return determinant(bordered(jacobian(p, s, cfg.fd_step), t));
}

std::optional<BranchEvent> detect_branch_point(const Problem& p, const SolutionPoint& a, const SolutionPoint& b,
                                               std::span<const double> t_a, std::span<const double> t_b,
                                               const ContinuationSettings& cfg) {
    const double tau_a = branch_test_function(p, a, t_a, cfg);
    const double tau_b = branch_test_function(p, b, t_b, cfg);
    const bool sign_change = (tau_a > 0) != (tau_b > 0) && tau_a != 0.0 && tau_b != 0.0;
    const DenseMatrix jb = jacobian(p, b, cfg.fd_step);
    const bool rank_drop = min_singular_values(jb, 1).front() < cfg.branch_point_tol;
    if (!sign_change && !rank_drop) return std::nullopt;

    BranchEvent ev;
    ev.kind = EventKind::BranchPoint;
    if (!sign_change) {
        ev.location = b;
        return ev;
    }
    // Bisection on arclength offset from a along t_a.
    double lo = 0.0;
    double hi = dot(difference(b.packed(), a.packed()), t_a);
    double tau_lo = tau_a;
    SolutionPoint best = std::abs(tau_a) < std::abs(tau_b) ? a : b;
    for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        const auto ap = point_along(p, a, t_a, b, mid, cfg);
        if (!ap) break;
        best = ap->point;
        const double tau_mid = branch_test_function(p, ap->point, ap->tangent, cfg);
        if (tau_mid == 0.0) break;
        if ((tau_mid > 0) == (tau_lo > 0)) {
            lo = mid;
            tau_lo = tau_mid;
        } else {
            hi = mid;
        }
    }
    ev.location = best;
    return ev;
}

BranchPointPassage continue_past_branch_point(const Problem& p, const BranchEvent& ev,
                                              std::span<const double> incoming_tangent,
                                              const ContinuationSettings& cfg) {
    if (ev.kind != EventKind::BranchPoint) throw std::invalid_argument("continue_past_branch_point: not a branch point");
    const Vector t_in = scaled(incoming_tangent, 1.0 / norm2(incoming_tangent));
    const Vector q0 = ev.location.packed();
    const double step = 2.0 * cfg.h0;
    const Vector pred = axpy(step, t_in, q0);
    BranchPointPassage out;
    out.point = newton_correct(p, SolutionPoint::unpack(pred), pred, t_in, cfg, step).point;
    out.tangent = bordered_tangent(p, out.point, t_in, cfg);

    const SvdResult s = svd(jacobian(p, ev.location, cfg.fd_step));
    const std::size_t n = s.right.cols();
    out.kernel = {s.right.column(n - 1), s.right.column(n - 2)};
    return out;
}

namespace {

class Tracer {
public:
    Tracer(const Problem& p, const ContinuationSettings& cfg) : p_(p), cfg_(cfg) {}

    Branch run(const SolutionPoint& s0, Vector t0) {
        b_ = Branch{};
        push(s0, std::move(t0));
        if (is_trivial(s0)) add_crossing(s0, 0, false);

        double h = cfg_.h0;
        int easy = 0;
        for (int step = 1; step <= cfg_.max_steps; ++step) {
            const SolutionPoint cur = b_.points.back();
            const Vector t = b_.tangents.back();

            if (try_close(h)) {
                b_.termination = Termination::ClosedLoop;
                return finish();
            }

            const Vector pred = axpy(h, t, cur.packed());
            std::optional<CorrectionResult> corr;
            Vector t_new;
            try {
                corr = newton_correct(p_, SolutionPoint::unpack(pred), pred, t, cfg_, h);
                t_new = bordered_tangent(p_, corr->point, t, cfg_);
                if (dot(t_new, t) < kMinTangentCos) corr.reset();
            } catch (const NumericalFailure&) {
                corr.reset();
            }
            if (!corr) {
                h *= 0.5;
                easy = 0;
                if (h < cfg_.h_min) {
                    b_.termination = Termination::SingularStall;
                    return finish();
                }
                continue;
            }

            sweep_events(cur, t, corr->point, t_new);
            push(corr->point, std::move(t_new));

            if (corr->iterations <= 3) {
                if (++easy >= 2) {
                    h = std::min(1.3 * h, cfg_.h_max);
                    easy = 0;
                }
            } else {
                easy = 0;
            }
            if (radius(corr->point) > cfg_.escape_radius) {
                b_.termination = Termination::Escaped;
                return finish();
            }
        }
        b_.termination = Termination::MaxSteps;
        return finish();
    }

private:
    static constexpr double kMinTangentCos = 0.8;

    void push(SolutionPoint s, Vector t) {
        if (!b_.points.empty()) b_.arclength += distance(b_.points.back(), s);
        b_.arclengths.push_back(b_.arclength);
        b_.points.push_back(std::move(s));
        b_.tangents.push_back(std::move(t));
    }

    Branch finish() { return std::move(b_); }

    bool try_close(double h) {
        const std::size_t k = b_.points.size() - 1;
        if (static_cast<int>(k) < cfg_.min_loop_steps) return false;
        const SolutionPoint& s0 = b_.points.front();
        const Vector& t0 = b_.tangents.front();
        const SolutionPoint& cur = b_.points.back();
        const Vector& t = b_.tangents.back();
        const Vector gap = difference(s0.packed(), cur.packed());
        if (norm2(gap) > h + cfg_.loop_tol || dot(gap, t) <= 0.0 || dot(t, t0) <= 0.0) return false;
        try {
            const auto res = newton_correct(p_, s0, s0.packed(), t, cfg_, h + cfg_.loop_tol);
            if (distance(res.point, s0) > cfg_.loop_tol) return false;
            Vector t_end = bordered_tangent(p_, res.point, t, cfg_);
            if (dot(t_end, t0) <= 0.0) return false;
            sweep_events(cur, t, res.point, t_end);
            push(res.point, std::move(t_end));
            return true;
        } catch (const NumericalFailure&) {
            return false;
        }
    }

    void add_crossing(const SolutionPoint& s, std::size_t step, bool degraded) {
        for (const auto& e : b_.events)
            if (e.kind == EventKind::TrivialCrossing && distance(e.location, s) <= cfg_.loop_tol) return;
        b_.events.push_back({EventKind::TrivialCrossing, s, step, degraded});
    }

    void add_branch_point(const BranchEvent& ev, std::size_t step) {
        for (const auto& e : b_.events)
            if (e.kind == EventKind::BranchPoint && distance(e.location, ev.location) <= cfg_.loop_tol) return;
        BranchEvent copy = ev;
        copy.step_index = step;
        b_.events.push_back(std::move(copy));
    }

    void sweep_events(const SolutionPoint& a, std::span<const double> t_a, const SolutionPoint& b,
                      std::span<const double> t_b) {
        const std::size_t step = b_.points.size();
        if (a.eps * b.eps < 0.0) {
            const auto c = locate_trivial_crossing(p_, a, b, cfg_);
            add_crossing(c.point, step, c.degraded);
        } else if (b.eps == 0.0) {
            add_crossing(b, step, false);
        } else if (eps_component(t_a) * eps_component(t_b) < 0.0) {
            locate_touch(a, t_a, b, step);
        }
        if (auto bp = detect_branch_point(p_, a, b, t_a, t_b, cfg_)) add_branch_point(*bp, step);
    }

    // eps has an extremum between a and b; record it if it sits on eps = 0.
    void locate_touch(const SolutionPoint& a, std::span<const double> t_a, const SolutionPoint& b, std::size_t step) {
        double lo = 0.0;
        double hi = dot(difference(b.packed(), a.packed()), t_a);
        const double sign_lo = eps_component(t_a);
        SolutionPoint best = std::abs(a.eps) < std::abs(b.eps) ? a : b;
        for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
            const double mid = 0.5 * (lo + hi);
            const auto ap = point_along(p_, a, t_a, b, mid, cfg_);
            if (!ap) break;
            if (std::abs(ap->point.eps) < std::abs(best.eps)) best = ap->point;
            if (eps_component(ap->tangent) * sign_lo > 0.0) lo = mid;
            else hi = mid;
        }
        if (std::abs(best.eps) > kTouchWindow) return;
        if (auto s = solve_trivial(p_, best, cfg_); s && distance(*s, best) <= kTouchWindow) add_crossing(*s, step, false);
    }

    static constexpr double kTouchWindow = 1e-7;

    const Problem& p_;
    const ContinuationSettings& cfg_;
    Branch b_;
};

}  // namespace

Branch trace_from(const Problem& p, const SolutionPoint& s0, std::span<const double> t0,
                  const ContinuationSettings& cfg) {
    cfg.validate();
    if (t0.size() != p.dim() + 2) throw DimensionError("trace_from: tangent has the wrong size");
    Tracer tracer(p, cfg);
    return tracer.run(s0, scaled(t0, 1.0 / norm2(t0)));
}

Branch trace_branch(const Problem& p, const SolutionPoint& s0, int orient, const ContinuationSettings& cfg) {
    cfg.validate();
    SolutionPoint start = s0;
    if (residual_norm(p, augmented_residual(p, start)) > cfg.newton_tol) start = polish_point(p, start, cfg);
    const Vector t0 = initial_tangent(p, start, orient, cfg);
    return trace_from(p, start, t0, cfg);
}

TraceResult trace_with_secondary(const Problem& p, const SolutionPoint& s0, int orient,
                                 const ContinuationSettings& cfg) {
    TraceResult out;
    out.primary = trace_branch(p, s0, orient, cfg);
    if (!cfg.secondary_branches) return out;
    // one secondary per branch point, in event order; a failed launch stalls at the junction
    auto stalled = [](const BranchEvent& ev, std::span<const double> t) {
        Branch b;
        b.points.push_back(ev.location);
        b.tangents.emplace_back(t.begin(), t.end());
        b.arclengths.push_back(0.0);
        b.termination = Termination::SingularStall;
        return b;
    };
    for (const auto& ev : out.primary.events_of(EventKind::BranchPoint)) {
        const std::size_t idx = ev.step_index > 0 ? ev.step_index - 1 : 0;
        const Vector& t_in = out.primary.tangents.at(idx);
        BranchPointPassage pass;
        try {
            pass = continue_past_branch_point(p, ev, t_in, cfg);
        } catch (const NumericalFailure&) {
            out.secondary.push_back(stalled(ev, t_in));
            continue;
        }
        // direction in the 2-d kernel orthogonal to the incoming tangent
        Vector u;
        double best = -1.0;
        for (const auto& k : pass.kernel) {
            Vector c = axpy(-dot(k, t_in), t_in, k);
            const double n = norm2(c);
            if (n > best) {
                best = n;
                u = scaled(c, 1.0 / n);
            }
        }
        if (best < 0.1) {
            out.secondary.push_back(stalled(ev, t_in));
            continue;
        }
        const std::size_t d = p.dim();
        if (u[d + 1] < 0.0 || (u[d + 1] == 0.0 && u[d] < 0.0)) u = scaled(u, -1.0);
        const Vector q0 = ev.location.packed();
        const Vector pred = axpy(cfg.h0, u, q0);
        try {
            const auto start = newton_correct(p, SolutionPoint::unpack(pred), pred, u, cfg, cfg.h0);
            const Vector t1 = bordered_tangent(p, start.point, u, cfg);
            out.secondary.push_back(trace_from(p, start.point, t1, cfg));
        } catch (const NumericalFailure&) {
            out.secondary.push_back(stalled(ev, u));
        }
    }
    return out;
}

double winding_number(const Branch& b) {
    double total = 0.0;
    const SolutionPoint* prev = nullptr;
    for (const auto& s : b.points) {
        if (radius(s) < 1e-12) continue;
        if (prev) {
            const double cross = prev->eps * s.lambda - prev->lambda * s.eps;
            const double dotp = prev->eps * s.eps + prev->lambda * s.lambda;
            total += std::atan2(cross, dotp);
        }
        prev = &s;
    }
    return total / (2.0 * std::numbers::pi);
}

}  // namespace eigbranch
