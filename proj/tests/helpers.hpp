#pragma once

#include "mamt/instance.hpp"

#include <algorithm>
#include <cstdint>
#include <tuple>
#include <vector>

namespace mamt::testing {

/// Deterministic 64-bit generator for test fixtures.
struct TestRng {
    uint64_t state;
    explicit TestRng(uint64_t seed) : state(seed) {}
    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform(double lo, double hi) {
        const double u = double(next() >> 11) * 0x1.0p-53;
        return lo + u * (hi - lo);
    }
};

/// Instance with one target per (t0,t1,p0,p1) tuple, one segment each.
inline Instance
single_segment_targets(Point2 depot, double v_max, double horizon, double arena_side,
                       const std::vector<std::tuple<double, double, Point2, Point2>> &segs,
                       int n_agents = 1) {
    Instance inst;
    inst.depot = depot;
    inst.n_agents = n_agents;
    inst.v_max = v_max;
    inst.horizon = horizon;
    inst.arena_side = arena_side;
    int tid = 1;
    for (const auto &[t0, t1, p0, p1] : segs) {
        Target target;
        target.id = tid++;
        target.segments.push_back(make_segment(0, target.id, t0, t1, p0, p1));
        inst.targets.push_back(target);
    }
    assign_segment_ids(inst);
    return inst;
}

/// One stationary target at `pos` over the whole horizon.
inline Instance stationary_instance(Point2 depot, Point2 pos, double v_max, double horizon,
                                    double arena_side, int n_agents = 1) {
    return single_segment_targets(depot, v_max, horizon, arena_side,
                                  {{0.0, horizon, pos, pos}}, n_agents);
}

/// Random multi-target instance with piecewise-linear trajectories; modest
/// speeds keep every waypoint inside the arena.
inline Instance random_instance(uint64_t seed, int n_targets, int segs_per_target,
                                double v_max = 4.0, double horizon = 150.0,
                                double arena_side = 100.0, int n_agents = 1) {
    TestRng rng(seed);
    Instance inst;
    inst.depot = {0.0, 0.0};
    inst.n_agents = n_agents;
    inst.v_max = v_max;
    inst.horizon = horizon;
    inst.arena_side = arena_side;
    const double half = arena_side / 2.0;
    for (int u = 1; u <= n_targets; ++u) {
        Target target;
        target.id = u;
        double t = rng.uniform(0.0, horizon / (4.0 * segs_per_target));
        Point2 p{rng.uniform(-half, half), rng.uniform(-half, half)};
        for (int c = 0; c < segs_per_target; ++c) {
            double dur = rng.uniform(5.0, horizon / (2.0 * segs_per_target));
            dur = std::min(dur, horizon - t);
            if (dur < 1.0) break;
            const Point2 q{rng.uniform(-half, half), rng.uniform(-half, half)};
            target.segments.push_back(make_segment(0, u, t, t + dur, p, q));
            if (rng.next() % 2) {
                // Gap before the next window; the target may teleport or stay.
                t += dur + rng.uniform(1.0, 5.0);
                p = rng.next() % 2 ? q
                                   : Point2{rng.uniform(-half, half), rng.uniform(-half, half)};
            } else {
                // Abutting windows must be continuous in position.
                t += dur;
                p = q;
            }
            if (t >= horizon - 1.0) break;
        }
        if (target.segments.empty())
            target.segments.push_back(make_segment(0, u, 0.0, horizon,
                                                   {rng.uniform(-half, half), 0.0},
                                                   {rng.uniform(-half, half), 0.0}));
        inst.targets.push_back(target);
    }
    assign_segment_ids(inst);
    return inst;
}

} // namespace mamt::testing
