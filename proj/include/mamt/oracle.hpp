#pragma once

#include "mamt/instance.hpp"
#include "mamt/recovery.hpp"

#include <optional>
#include <vector>

namespace mamt {

/// Ordered segment ids per agent; together the routes cover every target
/// exactly once, and no route visits two segments of the same target.
struct SequencePlan {
    std::vector<std::vector<int>> routes;
};

/// Earliest time t in [max(t0, window start), window end] at which an agent
/// leaving `from` at t0 with top speed v_max can stand on the segment:
/// ||position_at(seg, t) - from|| <= v_max * (t - t0). Closed-form quadratic
/// roots; tangency (discriminant within -1e-12 of zero) counts as a hit.
std::optional<double> earliest_intercept(const Point2 &from, double t0,
                                         const Segment &seg, double v_max);

/// Greedy completion time of a single-agent route: chain earliest_intercept
/// through the segments, then return to the depot; fails if any intercept is
/// impossible or the return lands after the horizon. Greedy is exact here
/// because intercept times are monotone in the start time.
std::optional<double> quickest_tour_time(const Instance &inst,
                                         const SequencePlan &plan);

/// Greedy over targets in the given order, trying each target's segments in
/// time order. Returns completion time plus the per-target choices; this is
/// the feasibility certificate used by instance generation.
struct CertifiedTour {
    double completion = 0.0;
    std::vector<int> segment_ids;   // per target, in visit order
    std::vector<double> visit_times; // same order
};
std::optional<CertifiedTour> certify_order(const Instance &inst,
                                           const std::vector<int> &target_order);

/// Shortest total length achievable with the plan's visit order fixed:
/// a convex program over visit times (window bounds, per-leg speed cones,
/// leg-length cones). Infeasible order -> nullopt.
std::optional<double> min_length_for_sequence(const Instance &inst,
                                              const SequencePlan &plan);

struct OracleLimits {
    int max_targets = 5;
    int max_agents = 3;
};

struct OracleResult {
    double objective = 0.0;
    SequencePlan plan;
    Solution solution;
};

/// Exact optimum by exhaustion: all target-to-agent partitions (agents are
/// interchangeable, so partitions are enumerated up to relabeling), visit
/// orders, and segment choices, each scored by min_length_for_sequence.
/// Throws std::invalid_argument beyond the limits.
OracleResult brute_force_optimum(const Instance &inst, const OracleLimits &limits = {});

} // namespace mamt
