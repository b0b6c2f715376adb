#include "mamt/oracle.hpp"

#include "mamt/socp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

namespace mamt {

namespace {

constexpr double kDiscriminantClamp = 1e-12;

struct MotionLaw {
    Point2 base; // position extrapolated to absolute time 0
    Point2 v;
};

MotionLaw law_of(const Segment &seg) {
    return {seg.p_start - seg.t_start * seg.velocity, seg.velocity};
}

} // namespace

std::optional<double> earliest_intercept(const Point2 &from, double t0,
                                         const Segment &seg, double v_max) {
    const double lo = std::max(t0, seg.t_start);
    if (lo > seg.t_end) return std::nullopt;

    // reach(t) = v_max^2 (t - t0)^2 - ||q(t) - from||^2 with q(t) = base + v t;
    // an intercept needs reach(t) >= 0 inside the window.
    const MotionLaw q = law_of(seg);
    const Point2 d = q.base - from;
    const double a = v_max * v_max - q.v.squared_norm();
    const double b = -2.0 * (v_max * v_max * t0 + d.dot(q.v));
    const double c = v_max * v_max * t0 * t0 - d.squared_norm();
    const auto reach = [&](double t) { return (a * t + b) * t + c; };

    if (reach(lo) >= 0.0) return lo;

    double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) {
        // Tangency within the clamp counts as a hit; anything below means the
        // target stays out of reach for good.
        if (disc < -kDiscriminantClamp) return std::nullopt;
        disc = 0.0;
    }
    const double sq = std::sqrt(disc);

    double t = 0.0;
    if (a > 0.0) {
        // Upward parabola and reach(lo) < 0: feasibility resumes at the
        // larger root.
        t = (-b + sq) / (2.0 * a);
    } else if (a == 0.0) {
        if (b <= 0.0) return std::nullopt; // never catches up
        t = -c / b;
    } else {
        // Slower agent: reachable only between the roots, if at all.
        const double r1 = (-b + sq) / (2.0 * a); // smaller (division flips)
        const double r2 = (-b - sq) / (2.0 * a);
        if (lo > r2) return std::nullopt;
        t = r1;
    }
    t = std::max(t, lo);
    if (t > seg.t_end) return std::nullopt;
    return t;
}

std::optional<double> quickest_tour_time(const Instance &inst, const SequencePlan &plan) {
    if (plan.routes.size() > 1)
        throw std::invalid_argument("quickest_tour_time takes a single-agent plan");
    Point2 pos = inst.depot;
    double t = 0.0;
    if (!plan.routes.empty()) {
        for (int seg_id : plan.routes[0]) {
            const Segment &seg = inst.segment(seg_id);
            auto hit = earliest_intercept(pos, t, seg, inst.v_max);
            if (!hit) return std::nullopt;
            t = *hit;
            pos = position_at_clamped(seg, t);
        }
    }
    const double completion = t + distance(pos, inst.depot) / inst.v_max;
    if (completion > inst.horizon) return std::nullopt;
    return completion;
}

std::optional<CertifiedTour> certify_order(const Instance &inst,
                                           const std::vector<int> &target_order) {
    CertifiedTour tour;
    Point2 pos = inst.depot;
    double t = 0.0;
    for (int target_id : target_order) {
        const Target *target = nullptr;
        for (const auto &cand : inst.targets)
            if (cand.id == target_id) target = &cand;
        if (!target) throw std::invalid_argument("unknown target id in order");

        bool intercepted = false;
        // Windows are disjoint and time-ordered, so the first segment that
        // admits an intercept admits the earliest one.
        for (const Segment &seg : target->segments) {
            auto hit = earliest_intercept(pos, t, seg, inst.v_max);
            if (!hit) continue;
            t = *hit;
            pos = position_at_clamped(seg, t);
            tour.segment_ids.push_back(seg.id);
            tour.visit_times.push_back(t);
            intercepted = true;
            break;
        }
        if (!intercepted) return std::nullopt;
    }
    tour.completion = t + distance(pos, inst.depot) / inst.v_max;
    if (tour.completion > inst.horizon) return std::nullopt;
    return tour;
}

namespace {

struct RouteScore {
    double length = 0.0;
    std::vector<double> times; // per visited segment, then the return time
};

// Shortest length for one agent's fixed route: visit times are the only
// decision, lengths enter through per-leg cones.
std::optional<RouteScore> score_route(const Instance &inst, const std::vector<int> &route) {
    if (route.empty()) return RouteScore{};

    ConicModel model;
    std::vector<VarRef> t_vars;
    for (int seg_id : route) {
        const Segment &seg = inst.segment(seg_id);
        t_vars.push_back(model.add_var("t_v" + std::to_string(seg_id), seg.t_start,
                                       seg.t_end));
    }
    t_vars.push_back(model.add_var("t_ret", 0.0, inst.horizon));

    const size_t legs = route.size() + 1;
    for (size_t j = 0; j < legs; ++j) {
        VarRef d = model.add_var("d" + std::to_string(j), 0.0, kInf);
        model.objective.push_back({d, 1.0});

        MotionLaw from{inst.depot, {0.0, 0.0}};
        VarRef t_from = -1;
        if (j > 0) {
            from = law_of(inst.segment(route[j - 1]));
            t_from = t_vars[j - 1];
        }
        MotionLaw to{inst.depot, {0.0, 0.0}};
        if (j < route.size()) to = law_of(inst.segment(route[j]));
        VarRef t_to = t_vars[j];

        SocRow cone;
        cone.name = "leg" + std::to_string(j);
        cone.vec.resize(2);
        for (int comp = 0; comp < 2; ++comp) {
            AffineExpr &expr = cone.vec[comp];
            expr.constant = to.base[comp] - from.base[comp];
            if (to.v[comp] != 0.0) expr.terms.push_back({t_to, to.v[comp]});
            if (t_from >= 0 && from.v[comp] != 0.0)
                expr.terms.push_back({t_from, -from.v[comp]});
        }
        cone.scalar.terms.push_back({d, 1.0});
        model.soc_rows.push_back(cone);

        LinearRow speed;
        speed.name = "speed" + std::to_string(j);
        speed.terms.push_back({d, 1.0});
        speed.terms.push_back({t_to, -inst.v_max});
        if (t_from >= 0) speed.terms.push_back({t_from, inst.v_max});
        speed.sense = RowSense::LessEqual;
        speed.rhs = 0.0;
        model.rows.push_back(speed);
    }

    RelaxResult res = solve_relaxation(model);
    if (res.status == RelaxStatus::NumericalFailure) {
        SocpOptions loose;
        loose.feas_tol = 1e-6;
        loose.gap_tol = 1e-7;
        res = solve_relaxation(model, loose);
    }
    if (res.status == RelaxStatus::Infeasible) return std::nullopt;
    if (res.status != RelaxStatus::Optimal)
        throw std::runtime_error("fixed-sequence subproblem did not solve");

    RouteScore score;
    score.length = res.objective;
    for (VarRef t : t_vars) score.times.push_back(res.solution[static_cast<size_t>(t)]);
    return score;
}

using RouteCache = std::map<std::vector<int>, std::optional<RouteScore>>;

const std::optional<RouteScore> &scored(const Instance &inst, RouteCache &cache,
                                        const std::vector<int> &route) {
    auto it = cache.find(route);
    if (it == cache.end()) it = cache.emplace(route, score_route(inst, route)).first;
    return it->second;
}

// Unlabeled set partitions of {0..n-1} into at most max_blocks nonempty
// blocks, in restricted-growth order.
void enumerate_partitions(int n, int max_blocks,
                          const std::function<void(const std::vector<std::vector<int>> &)> &emit) {
    std::vector<std::vector<int>> blocks;
    std::function<void(int)> place = [&](int item) {
        if (item == n) {
            emit(blocks);
            return;
        }
        // The recursive call grows and shrinks `blocks`, so iterate by index:
        // a range-for reference would dangle across the reallocation.
        const size_t open = blocks.size();
        for (size_t b = 0; b < open; ++b) {
            blocks[b].push_back(item);
            place(item + 1);
            blocks[b].pop_back();
        }
        if (static_cast<int>(blocks.size()) < max_blocks) {
            blocks.push_back({item});
            place(item + 1);
            blocks.pop_back();
        }
    };
    place(0);
}

} // namespace

std::optional<double> min_length_for_sequence(const Instance &inst,
                                              const SequencePlan &plan) {
    double total = 0.0;
    for (const auto &route : plan.routes) {
        auto score = score_route(inst, route);
        if (!score) return std::nullopt;
        total += score->length;
    }
    return total;
}

OracleResult brute_force_optimum(const Instance &inst, const OracleLimits &limits) {
    const int n = inst.n_targets();
    const int m = inst.n_agents;
    if (n > limits.max_targets || m > limits.max_agents)
        throw std::invalid_argument("instance exceeds the exhaustive-search limits");
    if (n == 0) throw std::invalid_argument("instance has no targets");

    RouteCache cache;
    bool found = false;
    double best_total = kInf;
    SequencePlan best_plan;

    // One partial route per block; recursion layers: pick an order for each
    // block, then a segment for each visited target.
    std::vector<std::vector<int>> routes;
    enumerate_partitions(n, std::min(m, n), [&](const std::vector<std::vector<int>> &blocks) {
        routes.assign(blocks.size(), {});
        double partial = 0.0;

        std::function<void(size_t)> fill_block = [&](size_t b) {
            if (partial >= best_total) return;
            if (b == blocks.size()) {
                if (partial < best_total) {
                    found = true;
                    best_total = partial;
                    best_plan.routes = routes;
                }
                return;
            }
            std::vector<int> order = blocks[b]; // target indices, ascending
            do {
                // Segment choices for this order, odometer over clusters.
                std::function<void(size_t)> pick_seg = [&](size_t pos) {
                    if (pos == order.size()) {
                        const auto &score = scored(inst, cache, routes[b]);
                        if (score) {
                            partial += score->length;
                            fill_block(b + 1);
                            partial -= score->length;
                        }
                        return;
                    }
                    for (const Segment &seg :
                         inst.targets[static_cast<size_t>(order[pos])].segments) {
                        routes[b].push_back(seg.id);
                        pick_seg(pos + 1);
                        routes[b].pop_back();
                    }
                };
                pick_seg(0);
            } while (std::next_permutation(order.begin(), order.end()));
        };
        fill_block(0);
    });

    if (!found) throw std::runtime_error("no feasible tour set exists for the instance");

    // Materialize the winning plan as a physical solution.
    OracleResult result;
    result.objective = best_total;
    result.plan = best_plan;
    for (const auto &route : best_plan.routes) {
        const auto &score = scored(inst, cache, route);
        Tour tour;
        tour.agent_id = static_cast<int>(result.solution.tours.size());
        tour.visits.push_back({{NodeKind::DepotStart, 0}, 0.0, inst.depot});
        for (size_t i = 0; i < route.size(); ++i) {
            const double t = score->times[i];
            tour.visits.push_back({{NodeKind::Segment, route[i]}, t,
                                   position_at_clamped(inst.segment(route[i]), t)});
        }
        tour.visits.push_back({{NodeKind::DepotEnd, 0}, score->times.back(), inst.depot});
        for (size_t i = 1; i < tour.visits.size(); ++i)
            tour.length += distance(tour.visits[i - 1].position, tour.visits[i].position);
        result.solution.total_length += tour.length;
        result.solution.tours.push_back(std::move(tour));
    }
    while (static_cast<int>(result.solution.tours.size()) < m) {
        Tour idle;
        idle.agent_id = static_cast<int>(result.solution.tours.size());
        result.solution.tours.push_back(std::move(idle));
    }
    return result;
}

} // namespace mamt
