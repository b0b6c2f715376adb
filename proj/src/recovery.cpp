#include "mamt/recovery.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace mamt {

using nlohmann::json;

namespace {

constexpr double kIntTol = 1e-6;
constexpr double kCrossTol = 1e-6;

int as_selected(double y, const std::string &what) {
    const double rounded = std::round(y);
    if (std::fabs(y - rounded) > kIntTol || rounded < 0.0 || rounded > 1.0)
        throw RecoveryError(what + " is not integral: " + std::to_string(y));
    return static_cast<int>(rounded);
}

Point2 node_point(const Instance &inst, const SegmentGraph &graph, int node, double t) {
    if (node == graph.depot_start() || node == graph.depot_end()) return inst.depot;
    return position_at_clamped(inst.segment(node), t);
}

double tour_length(const std::vector<Visit> &visits) {
    double len = 0.0;
    for (size_t i = 1; i < visits.size(); ++i)
        len += distance(visits[i - 1].position, visits[i].position);
    return len;
}

// Walks depot-to-depot paths over the selected edges; `next` holds the unique
// selected out-edge per node (-1 none, -2 conflict).
struct SelectedEdges {
    std::vector<int> chosen; // edge indices with selector 1
    std::vector<int> next;   // per node
};

SelectedEdges collect_selected(const SegmentGraph &graph,
                               const std::vector<char> &selected) {
    SelectedEdges out;
    out.next.assign(static_cast<size_t>(graph.node_count()), -1);
    for (int e = 0; e < graph.edge_count(); ++e) {
        if (!selected[static_cast<size_t>(e)]) continue;
        out.chosen.push_back(e);
        const int tail = graph.edges[e].tail;
        if (tail == graph.depot_start()) continue; // several departures allowed
        out.next[static_cast<size_t>(tail)] =
            out.next[static_cast<size_t>(tail)] == -1 ? e : -2;
    }
    return out;
}

// Follows selected edges from one depot-out edge to the depot end, reporting
// each visited node and the incoming edge that reached it.
std::vector<std::pair<int, int>> walk_path(const SegmentGraph &graph,
                                           const SelectedEdges &sel, int first_edge,
                                           std::vector<char> &node_used,
                                           size_t &edges_used) {
    std::vector<std::pair<int, int>> hops;
    int edge = first_edge;
    while (true) {
        ++edges_used;
        const int node = graph.edges[edge].head;
        hops.push_back({node, edge});
        if (node == graph.depot_end()) return hops;
        if (node_used[static_cast<size_t>(node)])
            throw RecoveryError("selected edges revisit " +
                                to_string(graph.node_id(node)) +
                                "; paths must be vertex-disjoint");
        node_used[static_cast<size_t>(node)] = 1;
        const int next = sel.next[static_cast<size_t>(node)];
        if (next == -1)
            throw RecoveryError("selected edges dead-end at " +
                                to_string(graph.node_id(node)));
        if (next == -2)
            throw RecoveryError("selected edges fork at " +
                                to_string(graph.node_id(node)));
        edge = next;
    }
}

Solution recover_new_micp(const Instance &inst, const SegmentGraph &graph,
                          const ConicModel &model, const std::vector<double> &x) {
    std::vector<char> selected(static_cast<size_t>(graph.edge_count()), 0);
    for (int e = 0; e < graph.edge_count(); ++e) {
        const double y = x[static_cast<size_t>(model.var({VarRole::FlowY, e, -1, 0}))];
        selected[static_cast<size_t>(e)] =
            static_cast<char>(as_selected(y, "edge selector " + std::to_string(e)));
    }
    SelectedEdges sel = collect_selected(graph, selected);

    Solution sol;
    std::vector<char> node_used(static_cast<size_t>(graph.node_count()), 0);
    size_t edges_used = 0;
    for (int first : graph.out_edges[graph.depot_start()]) {
        if (!selected[static_cast<size_t>(first)]) continue;
        Tour tour;
        tour.agent_id = static_cast<int>(sol.tours.size());
        tour.visits.push_back({graph.node_id(graph.depot_start()), 0.0, inst.depot});
        for (auto [node, edge] : walk_path(graph, sel, first, node_used, edges_used)) {
            const double t =
                x[static_cast<size_t>(model.var({VarRole::ZTimeHead, edge, -1, 0}))];
            const Point2 p = node_point(inst, graph, node, t);
            const Point2 zp = {
                x[static_cast<size_t>(model.var({VarRole::ZPosHead, edge, -1, 0}))],
                x[static_cast<size_t>(model.var({VarRole::ZPosHead, edge, -1, 1}))]};
            if (distance(p, zp) > kCrossTol)
                throw RecoveryError("activated position disagrees with the trajectory at " +
                                    to_string(graph.node_id(node)));
            tour.visits.push_back({graph.node_id(node), t, p});
        }
        tour.length = tour_length(tour.visits);
        sol.total_length += tour.length;
        sol.tours.push_back(std::move(tour));
    }
    if (edges_used != sel.chosen.size())
        throw RecoveryError("selected edges contain a cycle that avoids the depot");
    while (static_cast<int>(sol.tours.size()) < inst.n_agents) {
        Tour idle;
        idle.agent_id = static_cast<int>(sol.tours.size());
        sol.tours.push_back(std::move(idle));
    }
    return sol;
}

Solution recover_baseline(const Instance &inst, const SegmentGraph &graph,
                          const ConicModel &model, const std::vector<double> &x) {
    Solution sol;
    for (int k = 0; k < inst.n_agents; ++k) {
        std::vector<char> selected(static_cast<size_t>(graph.edge_count()), 0);
        for (int e = 0; e < graph.edge_count(); ++e) {
            const double y = x[static_cast<size_t>(model.var({VarRole::FlowY, e, k, 0}))];
            selected[static_cast<size_t>(e)] = static_cast<char>(
                as_selected(y, "edge selector " + std::to_string(e) + " of agent " +
                                   std::to_string(k)));
        }
        SelectedEdges sel = collect_selected(graph, selected);

        Tour tour;
        tour.agent_id = k;
        int first = -1;
        for (int e : graph.out_edges[graph.depot_start()])
            if (selected[static_cast<size_t>(e)]) {
                if (first != -1)
                    throw RecoveryError("agent " + std::to_string(k) +
                                        " departs the depot twice");
                first = e;
            }
        if (first != -1) {
            std::vector<char> node_used(static_cast<size_t>(graph.node_count()), 0);
            size_t edges_used = 0;
            tour.visits.push_back({graph.node_id(graph.depot_start()), 0.0, inst.depot});
            for (auto [node, edge] : walk_path(graph, sel, first, node_used, edges_used)) {
                (void)edge;
                const double t =
                    x[static_cast<size_t>(model.var({VarRole::TimeT, node, k, 0}))];
                tour.visits.push_back({graph.node_id(node), t,
                                       node_point(inst, graph, node, t)});
            }
            if (edges_used != sel.chosen.size())
                throw RecoveryError("agent " + std::to_string(k) +
                                    " selects a cycle that avoids the depot");
            tour.length = tour_length(tour.visits);
        } else if (!sel.chosen.empty()) {
            throw RecoveryError("agent " + std::to_string(k) +
                                " selects edges but never leaves the depot");
        }
        sol.total_length += tour.length;
        sol.tours.push_back(std::move(tour));
    }
    return sol;
}

} // namespace

Solution recover_tours(const Instance &inst, const SegmentGraph &graph,
                       const ConicModel &model, const std::vector<double> &x) {
    if (x.size() != model.vars.size())
        throw RecoveryError("assignment length does not match the model");
    if (model.has_label({VarRole::Alpha, 0, -1, 0}))
        return recover_new_micp(inst, graph, model, x);
    return recover_baseline(inst, graph, model, x);
}

std::vector<Finding> validate_solution(const Instance &inst, const Solution &sol,
                                       double tol) {
    std::vector<Finding> out;
    std::map<int, int> visits_per_target;
    for (const auto &target : inst.targets) visits_per_target[target.id] = 0;

    double length_sum = 0.0;
    for (const auto &tour : sol.tours) {
        const std::string who = "agent " + std::to_string(tour.agent_id);
        if (tour.visits.empty()) {
            if (tour.length != 0.0)
                out.push_back({Severity::Error, "tour.length",
                               who + ": idle tour with nonzero length"});
            continue;
        }
        const Visit &first = tour.visits.front();
        if (first.node.kind != NodeKind::DepotStart || std::fabs(first.time) > tol ||
            distance(first.position, inst.depot) > tol)
            out.push_back({Severity::Error, "tour.departure",
                           who + ": tour must start at the depot at time 0"});
        if (tour.visits.back().node.kind != NodeKind::DepotEnd)
            out.push_back({Severity::Error, "tour.termination",
                           who + ": tour must end at the depot"});

        for (size_t i = 0; i < tour.visits.size(); ++i) {
            const Visit &v = tour.visits[i];
            const std::string where = who + " visit " + std::to_string(i) + " (" +
                                      to_string(v.node) + ")";
            double lo = 0.0, hi = inst.horizon;
            Point2 expect = inst.depot;
            if (v.node.kind == NodeKind::Segment) {
                const Segment &seg = inst.segment(v.node.seg_id);
                ++visits_per_target[seg.target_id];
                lo = seg.t_start;
                hi = seg.t_end;
                expect = position_at_clamped(seg, v.time);
            }
            if (v.time < lo - tol || v.time > hi + tol)
                out.push_back({Severity::Error, "tour.window",
                               where + ": visit time outside the window"});
            if (distance(v.position, expect) > tol)
                out.push_back({Severity::Error, "tour.position",
                               where + ": position is off the trajectory"});
            if (i == 0) continue;
            const Visit &prev = tour.visits[i - 1];
            if (v.time < prev.time - tol)
                out.push_back({Severity::Error, "tour.order",
                               where + ": visit times must not decrease"});
            if (distance(v.position, prev.position) >
                inst.v_max * (v.time - prev.time) + tol)
                out.push_back({Severity::Error, "tour.speed",
                               where + ": leg needs more than the top speed"});
        }
        double legs = 0.0;
        for (size_t i = 1; i < tour.visits.size(); ++i)
            legs += distance(tour.visits[i - 1].position, tour.visits[i].position);
        if (std::fabs(legs - tour.length) > tol)
            out.push_back({Severity::Error, "tour.length",
                           who + ": stored length disagrees with the legs"});
        length_sum += tour.length;
    }

    for (const auto &[target_id, count] : visits_per_target)
        if (count != 1)
            out.push_back({Severity::Error, "solution.visit_count",
                           "target " + std::to_string(target_id) + " visited " +
                               std::to_string(count) + " times"});
    if (std::fabs(length_sum - sol.total_length) > tol)
        out.push_back({Severity::Error, "solution.length",
                       "total length disagrees with the tour sum"});
    return out;
}

std::string save_solution(const Solution &sol) {
    json doc;
    doc["version"] = 1;
    doc["total_length"] = sol.total_length;
    json jtours = json::array();
    for (const auto &tour : sol.tours) {
        json jt;
        jt["agent_id"] = tour.agent_id;
        jt["length"] = tour.length;
        json jvisits = json::array();
        for (const auto &v : tour.visits)
            jvisits.push_back({{"node", to_string(v.node)},
                               {"time", v.time},
                               {"position", {{"x", v.position.x}, {"y", v.position.y}}}});
        jt["visits"] = std::move(jvisits);
        jtours.push_back(std::move(jt));
    }
    doc["tours"] = std::move(jtours);
    return doc.dump(2) + "\n";
}

Solution load_solution(const std::string &text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ParseError(std::string("solution file: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("tours") || !doc.at("tours").is_array())
        throw ParseError("solution file: expected an object with a 'tours' array");
    Solution sol;
    sol.total_length = doc.value("total_length", 0.0);
    for (const json &jt : doc.at("tours")) {
        Tour tour;
        tour.agent_id = jt.value("agent_id", 0);
        tour.length = jt.value("length", 0.0);
        if (jt.contains("visits")) {
            for (const json &jv : jt.at("visits")) {
                Visit v;
                try {
                    v.node = parse_node_id(jv.at("node").get<std::string>());
                } catch (const std::exception &e) {
                    throw ParseError(std::string("solution file: ") + e.what());
                }
                v.time = jv.value("time", 0.0);
                const json &jp = jv.at("position");
                v.position = {jp.value("x", 0.0), jp.value("y", 0.0)};
                tour.visits.push_back(v);
            }
        }
        sol.tours.push_back(std::move(tour));
    }
    return sol;
}

void save_solution_file(const Solution &sol, const std::string &path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write solution file: " + path);
    out << save_solution(sol);
}

Solution load_solution_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open solution file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return load_solution(buf.str());
}

} // namespace mamt
