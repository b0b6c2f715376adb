#include "mamt/instance_gen.hpp"

#include "mamt/oracle.hpp"
#include "mamt/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace mamt {

namespace {

constexpr int kTrajectoryTries = 100;
constexpr int kOrderTries = 1000;
constexpr int kWindowTries = 100;
constexpr int kPlacementTries = 1000;

// One target's full trajectory: waypoint loop traced at constant speed until
// the horizon, as time-ordered linear pieces covering [0, horizon].
std::vector<Segment> trace_trajectory(const GenConfig &cfg, Rng &rng) {
    while (true) {
        const int n_waypoints = rng.uniform_int(3, 6);
        const double half = cfg.arena_side / 2.0;
        std::vector<Point2> pts;
        for (int i = 0; i < n_waypoints; ++i)
            pts.push_back({rng.uniform(-half, half), rng.uniform(-half, half)});
        const double speed = rng.uniform(cfg.speed_min, cfg.speed_max);

        std::vector<Segment> pieces;
        double t = 0.0;
        int at = 0;
        while (t < cfg.horizon) {
            const Point2 &a = pts[static_cast<size_t>(at)];
            const Point2 &b = pts[static_cast<size_t>((at + 1) % n_waypoints)];
            const double d = distance(a, b);
            at = (at + 1) % n_waypoints;
            if (d <= 0.0) continue; // coincident waypoints contribute no piece
            double t_end = t + d / speed;
            Point2 p_end = b;
            if (t_end > cfg.horizon) {
                p_end = a + ((cfg.horizon - t) / (t_end - t)) * (b - a);
                t_end = cfg.horizon;
            }
            pieces.push_back(make_segment(0, 0, t, t_end, a, p_end));
            t = t_end;
        }
        if (!pieces.empty()) return pieces;
        // All waypoints coincided; draw a fresh set.
    }
}

Instance assemble(const GenConfig &cfg, const std::vector<std::vector<Segment>> &per_target,
                  int n_agents) {
    Instance inst;
    inst.depot = {0.0, 0.0};
    inst.n_agents = n_agents;
    inst.v_max = cfg.v_max;
    inst.horizon = cfg.horizon;
    inst.arena_side = cfg.arena_side;
    for (size_t u = 0; u < per_target.size(); ++u) {
        Target target;
        target.id = static_cast<int>(u) + 1;
        target.segments = per_target[u];
        inst.targets.push_back(std::move(target));
    }
    assign_segment_ids(inst);
    return inst;
}

std::vector<Segment> clip_to_windows(const std::vector<Segment> &trajectory,
                                     const std::vector<std::pair<double, double>> &windows) {
    std::vector<Segment> out;
    for (const auto &[w_lo, w_hi] : windows) {
        for (const Segment &piece : trajectory) {
            const double lo = std::max(piece.t_start, w_lo);
            const double hi = std::min(piece.t_end, w_hi);
            if (hi - lo <= 1e-9) continue;
            out.push_back(make_segment(0, 0, lo, hi, position_at(piece, lo),
                                       position_at(piece, hi)));
        }
    }
    return out;
}

} // namespace

Instance generate_instance(const GenConfig &cfg) {
    if (cfg.n_targets < 1) throw std::invalid_argument("n_targets must be positive");
    if (cfg.windows_per_target != 2)
        throw std::invalid_argument("the recipe places exactly two windows per target");
    const double window = cfg.total_window_duration / 2.0;
    if (!(window > 0.0) || cfg.total_window_duration > cfg.horizon)
        throw std::invalid_argument("window durations must be positive and fit the horizon");
    if (!(cfg.speed_min <= cfg.speed_max) || cfg.speed_min <= 0.0)
        throw std::invalid_argument("speed range must be positive and ordered");

    Rng rng(cfg.seed);
    for (int traj_try = 0; traj_try < kTrajectoryTries; ++traj_try) {
        std::vector<std::vector<Segment>> trajectories;
        for (int u = 0; u < cfg.n_targets; ++u)
            trajectories.push_back(trace_trajectory(cfg, rng));
        // Certification runs one agent over the full trajectories.
        Instance full = assemble(cfg, trajectories, 1);

        for (int order_try = 0; order_try < kOrderTries; ++order_try) {
            std::vector<int> order;
            for (int u = 1; u <= cfg.n_targets; ++u) order.push_back(u);
            for (int i = cfg.n_targets - 1; i > 0; --i)
                std::swap(order[static_cast<size_t>(i)],
                          order[static_cast<size_t>(rng.uniform_int(0, i))]);

            auto cert = certify_order(full, order);
            if (!cert) continue;
            std::vector<double> visit_time(static_cast<size_t>(cfg.n_targets) + 1, 0.0);
            for (size_t i = 0; i < order.size(); ++i)
                visit_time[static_cast<size_t>(order[i])] = cert->visit_times[i];

            for (int window_try = 0; window_try < kWindowTries; ++window_try) {
                std::vector<std::vector<Segment>> clipped;
                bool placed_all = true;
                for (int u = 1; u <= cfg.n_targets; ++u) {
                    const double tau = visit_time[static_cast<size_t>(u)];
                    // First window covers the certified visit.
                    const double lo1 = std::max(0.0, tau - window);
                    const double hi1 = std::min(tau, cfg.horizon - window);
                    const double a1 = rng.uniform(lo1, hi1);
                    // Second window lands anywhere disjoint from the first.
                    double a2 = -1.0;
                    for (int tries = 0; tries < kPlacementTries; ++tries) {
                        const double cand = rng.uniform(0.0, cfg.horizon - window);
                        if (cand + window <= a1 || cand >= a1 + window) {
                            a2 = cand;
                            break;
                        }
                    }
                    if (a2 < 0.0) {
                        placed_all = false;
                        break;
                    }
                    std::vector<std::pair<double, double>> windows = {
                        {a1, a1 + window}, {a2, a2 + window}};
                    if (windows[0].first > windows[1].first)
                        std::swap(windows[0], windows[1]);
                    clipped.push_back(
                        clip_to_windows(trajectories[static_cast<size_t>(u - 1)], windows));
                }
                if (!placed_all) continue;

                Instance inst = assemble(cfg, clipped, cfg.n_agents);
                if (has_errors(validate_instance(inst))) continue;
                // The windows narrow the intercept options; make sure the
                // certifying order still finishes within the horizon.
                Instance probe = inst;
                probe.n_agents = 1;
                if (!certify_order(probe, order)) continue;
                return inst;
            }
        }
    }
    throw std::runtime_error("instance generation exhausted its retry budget");
}

} // namespace mamt
