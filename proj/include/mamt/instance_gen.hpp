#pragma once

#include "mamt/instance.hpp"

#include <cstdint>

namespace mamt {

/// Random-instance recipe: targets follow piecewise-linear loops through
/// random waypoints at a constant per-target speed, a random visiting order
/// is certified feasible for one agent at top speed, and each target is then
/// observable through two disjoint time windows, one of which contains the
/// certified visit.
struct GenConfig {
    int n_targets = 5;
    double arena_side = 100.0;
    double horizon = 150.0;
    double v_max = 4.0;
    double speed_min = 0.5;
    double speed_max = 1.0;
    double total_window_duration = 40.0; // split evenly across the windows
    int windows_per_target = 2;
    int n_agents = 1;
    std::uint64_t seed = 1;
};

/// Deterministic under the config (fixed draw order, no platform-dependent
/// randomness). Throws std::runtime_error when no feasible layout is found
/// within the retry budget.
Instance generate_instance(const GenConfig &cfg);

} // namespace mamt
