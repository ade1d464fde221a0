#pragma once

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eigbranch/problem.hpp"

namespace eigbranch {

/// The start point cannot seed a one-dimensional branch: the augmented
/// Jacobian has a kernel of dimension != 1, or the start is a non-simple
/// trivial solution.
class SingularStart : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CorrectionFailure : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

struct ContinuationSettings {
    double h0 = 0.05;
    double h_min = 1e-6;
    double h_max = 0.25;
    double newton_tol = 1e-10;
    int newton_max_iter = 12;
    double escape_radius = 10.0;  // on sqrt(eps^2 + lambda^2)
    double loop_tol = 1e-6;
    int min_loop_steps = 10;
    int max_steps = 20000;
    double branch_point_tol = 1e-6;
    double fd_step = 0.0;  // <= 0 selects 1e-6 (1 + |x|)
    double rank_tol = 1e-8;
    bool secondary_branches = false;

    /// Throws std::invalid_argument when the invariants do not hold.
    void validate() const;
    /// Sets one field from its textual name; false for unknown keys.
    bool set(const std::string& key, double value);
};

enum class EventKind { TrivialCrossing, BranchPoint };
enum class Termination { ClosedLoop, Escaped, SingularStall, MaxSteps };

std::string to_string(EventKind k);
std::string to_string(Termination t);

struct BranchEvent {
    EventKind kind = EventKind::TrivialCrossing;
    SolutionPoint location;
    std::size_t step_index = 0;  // first accepted point past the event (0 for the start)
    bool degraded = false;  // crossing polish did not converge; secant estimate kept
};

struct Branch {
    std::vector<SolutionPoint> points;
    std::vector<Vector> tangents;  // unit, dim + 2 entries
    std::vector<double> arclengths;
    std::vector<BranchEvent> events;
    Termination termination = Termination::MaxSteps;
    double arclength = 0.0;

    std::vector<BranchEvent> events_of(EventKind k) const;
};

struct CorrectionResult {
    SolutionPoint point;
    int iterations = 0;
};

struct CrossingResult {
    SolutionPoint point;
    bool degraded = false;
};

struct BranchPointPassage {
    SolutionPoint point;
    Vector tangent;
    std::vector<Vector> kernel;  // approximate 2-dimensional kernel of the Jacobian at the event
};

struct TraceResult {
    Branch primary;
    std::vector<Branch> secondary;  // one per branch point, when enabled
};

/// Unit kernel vector of the augmented Jacobian at s0, oriented so its eps
/// component has the sign of `orient`.
Vector initial_tangent(const Problem& p, const SolutionPoint& s0, int orient, const ContinuationSettings& cfg = {});

/// Newton on {augmented residual = 0, <normal, q - anchor> = 0}. Fails when
/// the iteration cap is hit or the iterate strays farther than max_distance
/// from the guess.
CorrectionResult newton_correct(const Problem& p, const SolutionPoint& guess, std::span<const double> anchor,
                                std::span<const double> normal, const ContinuationSettings& cfg = {},
                                double max_distance = std::numeric_limits<double>::infinity());

/// Tangent at s from the bordered system [J; previous^T] t = e_last, normalized.
/// Orientation therefore follows `previous`.
Vector bordered_tangent(const Problem& p, const SolutionPoint& s, std::span<const double> previous,
                        const ContinuationSettings& cfg = {});

/// Trivial solution between two accepted points whose eps values bracket zero.
CrossingResult locate_trivial_crossing(const Problem& p, const SolutionPoint& a, const SolutionPoint& b,
                                       const ContinuationSettings& cfg = {});

/// det([J(s); t^T]), the branch-point test function.
double branch_test_function(const Problem& p, const SolutionPoint& s, std::span<const double> t,
                            const ContinuationSettings& cfg = {});

std::optional<BranchEvent> detect_branch_point(const Problem& p, const SolutionPoint& a, const SolutionPoint& b,
                                               std::span<const double> t_a, std::span<const double> t_b,
                                               const ContinuationSettings& cfg = {});

/// Steps 2*h0 past the event along the incoming tangent and corrects with that
/// tangent's plane frozen. Throws CorrectionFailure when the corrector fails.
BranchPointPassage continue_past_branch_point(const Problem& p, const BranchEvent& ev,
                                              std::span<const double> incoming_tangent,
                                              const ContinuationSettings& cfg = {});

Branch trace_branch(const Problem& p, const SolutionPoint& s0, int orient, const ContinuationSettings& cfg = {});

/// Traces from s0 with an explicit initial tangent (secondary launches,
/// restarts). No simplicity requirement on s0.
Branch trace_from(const Problem& p, const SolutionPoint& s0, std::span<const double> t0,
                  const ContinuationSettings& cfg = {});

/// trace_branch plus, when cfg.secondary_branches is set, one secondary trace
/// per detected branch point along the kernel direction transverse to the
/// primary tangent. secondary[k] belongs to the k-th branch point; a launch that
/// cannot be corrected is a one-point SingularStall branch.
TraceResult trace_with_secondary(const Problem& p, const SolutionPoint& s0, int orient,
                                 const ContinuationSettings& cfg = {});

/// Summed signed angle of (eps, lambda) around the origin over the branch, in turns.
double winding_number(const Branch& b);

/// Gauss-Newton on the augmented residual with (eps, lambda) free; pulls a
/// near-solution onto the solution set. Throws CorrectionFailure.
SolutionPoint polish_point(const Problem& p, const SolutionPoint& s, const ContinuationSettings& cfg = {});

inline constexpr double kTrivialEpsTol = 1e-9;

}  // namespace eigbranch
