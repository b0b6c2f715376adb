#pragma once

#include "mamt/geometry.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace mamt {

/// One linear piece of a target's trajectory inside a time window.
/// Velocity is always the derived value (p_end - p_start) / (t_end - t_start);
/// it is never read from files.
struct Segment {
    int id = 0;        // unique, dense 1..|V_seg| in (target, time) order
    int target_id = 0;
    double t_start = 0.0;
    double t_end = 0.0;
    Point2 p_start;
    Point2 p_end;
    Point2 velocity;

    double duration() const { return t_end - t_start; }
};

/// Builds a segment with the velocity derived from its endpoints.
/// Degenerate durations get a zero velocity and are rejected by validation.
Segment make_segment(int id, int target_id, double t_start, double t_end,
                     Point2 p_start, Point2 p_end);

/// A moving target: ordered, non-overlapping trajectory segments.
struct Target {
    int id = 0;
    std::vector<Segment> segments;
};

/// A full problem instance. Immutable after load; safe to share across threads.
struct Instance {
    Point2 depot;        // both depot copies s and s' sit here
    int n_agents = 1;
    double v_max = 0.0;  // agent speed limit, units/sec
    double horizon = 0.0;                // T
    double arena_side = 0.0;             // S; big-M distance R = sqrt(2) * S
    std::vector<Target> targets;

    int n_targets() const { return static_cast<int>(targets.size()); }
    int n_segments() const;
    double big_m_distance() const { return std::sqrt(2.0) * arena_side; }

    /// Segment lookup by dense id (1-based). Throws std::out_of_range.
    const Segment &segment(int seg_id) const;
};

/// Target position on a segment at time t in [t_start, t_end].
/// Throws std::domain_error outside the window.
Point2 position_at(const Segment &seg, double t);

/// position_at with t clamped into the window; recovery uses this so that
/// solver round-off at a window boundary does not throw.
Point2 position_at_clamped(const Segment &seg, double t);

enum class Severity { Warning, Error };

struct Finding {
    Severity severity = Severity::Error;
    std::string code;     // stable machine-readable id, e.g. "segment.degenerate"
    std::string message;
};

/// Checks every instance invariant. Violations come back as findings, never
/// exceptions. Target speeds at or above v_max are a warning only: the
/// formulations stay well-posed without the faster-agent assumption.
std::vector<Finding> validate_instance(const Instance &inst);

inline bool has_errors(const std::vector<Finding> &findings) {
    for (const auto &f : findings)
        if (f.severity == Severity::Error) return true;
    return false;
}

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::vector<Finding> &findings);
    std::vector<Finding> findings;
};

/// Instance file I/O (JSON, see README for the schema). Segment ids are
/// re-assigned densely in (target, time) order at load; velocities and the
/// big-M distance R are always derived, never serialized.
Instance load_instance(const std::string &text);
std::string save_instance(const Instance &inst);

Instance load_instance_file(const std::string &path);
void save_instance_file(const Instance &inst, const std::string &path);

/// Re-assigns dense segment ids in (target, time) order and rebuilds the
/// segment index. Called by load_instance; programmatic builders use it too.
void assign_segment_ids(Instance &inst);

} // namespace mamt
