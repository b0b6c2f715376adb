#pragma once

#include "mamt/conic_model.hpp"
#include "mamt/graph.hpp"
#include "mamt/instance.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace mamt {

struct Visit {
    NodeId node;
    double time = 0.0;
    Point2 position;
};

/// One agent's tour: depot at time 0, the visited segment nodes in order,
/// depot again. Idle agents carry an empty visit list and zero length.
struct Tour {
    int agent_id = 0;
    std::vector<Visit> visits;
    double length = 0.0; // sum of leg distances
};

struct Solution {
    std::vector<Tour> tours; // one per agent, idle agents included
    double total_length = 0.0;
};

/// A selector assignment that cannot be decomposed into depot-to-depot paths
/// (or whose activated positions contradict the trajectories).
struct RecoveryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Extracts per-agent tours from an integral assignment of either
/// formulation (detected from the model's labels). Selected edges must form
/// vertex-disjoint depot-to-depot paths; paths are assigned to agents in
/// discovery order (depot-out edges scanned by index) and remaining agents
/// stay idle. Visit times come from the assignment; positions are recomputed
/// from the trajectories and cross-checked against the assignment's activated
/// positions within 1e-6 where those exist.
Solution recover_tours(const Instance &inst, const SegmentGraph &graph,
                       const ConicModel &model, const std::vector<double> &x);

/// Checks a candidate solution against the physical problem: departure at
/// time 0, window containment, positions on the trajectories, leg speeds
/// within v_max, every target visited exactly once, and consistent lengths.
/// Violations come back as findings (codes "tour.*" / "solution.*").
std::vector<Finding> validate_solution(const Instance &inst, const Solution &sol,
                                       double tol = 1e-6);

/// Solution file I/O (JSON; field names match the Tour/Visit structs).
std::string save_solution(const Solution &sol);
Solution load_solution(const std::string &text);
void save_solution_file(const Solution &sol, const std::string &path);
Solution load_solution_file(const std::string &path);

} // namespace mamt
