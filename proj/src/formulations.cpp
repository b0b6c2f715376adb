#include "mamt/formulations.hpp"

#include <stdexcept>
#include <string>

namespace mamt {

namespace {

// Motion data for a graph node: window, velocity, and the linear position law
// p(t) = base + t * v extrapolated to absolute time zero.
struct NodeMotion {
    double t_lo = 0.0;
    double t_hi = 0.0;
    Point2 v{0.0, 0.0};
    Point2 base{0.0, 0.0};
};

NodeMotion node_motion(const Instance &inst, const SegmentGraph &graph, int node) {
    NodeMotion nm;
    if (node == graph.depot_start()) {
        nm.base = inst.depot;
        return nm;
    }
    if (node == graph.depot_end()) {
        nm.t_hi = inst.horizon;
        nm.base = inst.depot;
        return nm;
    }
    const Segment &seg = inst.segment(node);
    nm.t_lo = seg.t_start;
    nm.t_hi = seg.t_end;
    nm.v = seg.velocity;
    nm.base = seg.p_start - seg.t_start * nm.v;
    return nm;
}

void add_term(LinearRow &row, VarRef var, double coeff) {
    if (coeff != 0.0) row.terms.push_back({var, coeff});
}

std::string comp_suffix(int comp) { return comp == 0 ? "_x" : "_y"; }

} // namespace

std::string to_string(FormulationKind kind) {
    return kind == FormulationKind::Baseline ? "baseline" : "micp";
}

FormulationKind parse_formulation(const std::string &name) {
    if (name == "baseline") return FormulationKind::Baseline;
    if (name == "micp") return FormulationKind::NewMicp;
    throw std::invalid_argument("unknown formulation '" + name + "' (expected baseline|micp)");
}

ConicModel build_baseline(const Instance &inst, const SegmentGraph &graph) {
    ConicModel model;
    const int m = inst.n_agents;
    const int n_edges = static_cast<int>(graph.edges.size());
    const int n_nodes = graph.node_count();
    const double T = inst.horizon;
    const double R = inst.big_m_distance();
    const double vmax = inst.v_max;

    // Edge variables, grouped per agent.
    for (int k = 0; k < m; ++k) {
        const std::string ks = "_k" + std::to_string(k);
        for (int e = 0; e < n_edges; ++e) {
            const std::string es = "_e" + std::to_string(e) + ks;
            VarRef y = model.add_var("y" + es, 0.0, 1.0, /*is_binary=*/true);
            VarRef l = model.add_var("l" + es, 0.0, kInf);
            VarRef lx = model.add_var("lxy" + es + "_x", -kInf, kInf);
            VarRef ly = model.add_var("lxy" + es + "_y", -kInf, kInf);
            VarRef lbar = model.add_var("lbar" + es, 0.0, kInf);
            model.set_label({VarRole::FlowY, e, k, 0}, y);
            model.set_label({VarRole::CostL, e, k, 0}, l);
            model.set_label({VarRole::CostLxy, e, k, 0}, lx);
            model.set_label({VarRole::CostLxy, e, k, 1}, ly);
            model.set_label({VarRole::LBar, e, k, 0}, lbar);
            model.objective.push_back({l, 1.0});
        }
    }
    // Node visit times, window as bounds (depot start pinned at zero).
    for (int k = 0; k < m; ++k) {
        for (int i = 0; i < n_nodes; ++i) {
            NodeMotion nm = node_motion(inst, graph, i);
            VarRef t = model.add_var(
                "t_" + to_string(graph.node_id(i)) + "_k" + std::to_string(k),
                nm.t_lo, nm.t_hi);
            model.set_label({VarRole::TimeT, i, k, 0}, t);
        }
    }

    auto y_of = [&](int e, int k) { return model.var({VarRole::FlowY, e, k, 0}); };
    auto t_of = [&](int i, int k) { return model.var({VarRole::TimeT, i, k, 0}); };

    // Each agent leaves the depot at most once and returns at most once.
    for (int k = 0; k < m; ++k) {
        LinearRow depart;
        depart.name = "depart_k" + std::to_string(k);
        for (int e : graph.out_edges[graph.depot_start()]) add_term(depart, y_of(e, k), 1.0);
        depart.sense = RowSense::LessEqual;
        depart.rhs = 1.0;
        model.rows.push_back(depart);

        LinearRow arrive;
        arrive.name = "arrive_k" + std::to_string(k);
        for (int e : graph.in_edges[graph.depot_end()]) add_term(arrive, y_of(e, k), 1.0);
        arrive.sense = RowSense::LessEqual;
        arrive.rhs = 1.0;
        model.rows.push_back(arrive);
    }

    // Every target is intercepted exactly once, on exactly one segment,
    // by exactly one agent.
    for (const auto &[target_id, cluster] : graph.clusters) {
        LinearRow visit;
        visit.name = "visit_u" + std::to_string(target_id);
        for (int i : cluster)
            for (int e : graph.in_edges[i])
                for (int k = 0; k < m; ++k) add_term(visit, y_of(e, k), 1.0);
        visit.sense = RowSense::Equal;
        visit.rhs = 1.0;
        model.rows.push_back(visit);
    }

    // Flow conservation per agent at every segment node.
    for (int k = 0; k < m; ++k) {
        for (int i = 1; i <= graph.n_segments; ++i) {
            LinearRow flow;
            flow.name = "flow_v" + std::to_string(i) + "_k" + std::to_string(k);
            for (int e : graph.in_edges[i]) add_term(flow, y_of(e, k), 1.0);
            for (int e : graph.out_edges[i]) add_term(flow, y_of(e, k), -1.0);
            flow.sense = RowSense::Equal;
            flow.rhs = 0.0;
            model.rows.push_back(flow);
        }
    }

    for (int k = 0; k < m; ++k) {
        const std::string ks = "_k" + std::to_string(k);
        for (int e = 0; e < n_edges; ++e) {
            const GraphEdge &edge = graph.edges[e];
            NodeMotion tail = node_motion(inst, graph, edge.tail);
            NodeMotion head = node_motion(inst, graph, edge.head);
            const std::string es = "_e" + std::to_string(e) + ks;
            VarRef y = y_of(e, k);
            VarRef l = model.var({VarRole::CostL, e, k, 0});
            VarRef lbar = model.var({VarRole::LBar, e, k, 0});

            // Traversed length fits in the available time; the horizon term
            // releases the row when the edge is unused.
            LinearRow speed;
            speed.name = "speed" + es;
            add_term(speed, l, 1.0);
            add_term(speed, t_of(edge.tail, k), vmax);
            add_term(speed, t_of(edge.head, k), -vmax);
            add_term(speed, y, vmax * T);
            speed.sense = RowSense::LessEqual;
            speed.rhs = vmax * T;
            model.rows.push_back(speed);

            // Displacement between the two intercept points under linear motion.
            for (int c = 0; c < 2; ++c) {
                LinearRow len;
                len.name = "len" + es + comp_suffix(c);
                add_term(len, model.var({VarRole::CostLxy, e, k, c}), 1.0);
                add_term(len, t_of(edge.head, k), -head.v[c]);
                add_term(len, t_of(edge.tail, k), tail.v[c]);
                len.sense = RowSense::Equal;
                len.rhs = head.base[c] - tail.base[c];
                model.rows.push_back(len);
            }

            // Shifted length absorbs the cone when the edge is unused.
            LinearRow shift;
            shift.name = "lbar" + es;
            add_term(shift, lbar, 1.0);
            add_term(shift, l, -1.0);
            add_term(shift, y, R);
            shift.sense = RowSense::Equal;
            shift.rhs = R;
            model.rows.push_back(shift);

            SocRow cone;
            cone.name = "cone" + es;
            cone.vec.resize(2);
            cone.vec[0].terms.push_back({model.var({VarRole::CostLxy, e, k, 0}), 1.0});
            cone.vec[1].terms.push_back({model.var({VarRole::CostLxy, e, k, 1}), 1.0});
            cone.scalar.terms.push_back({lbar, 1.0});
            model.soc_rows.push_back(cone);
        }
    }
    return model;
}

ConicModel build_new_micp(const Instance &inst, const SegmentGraph &graph) {
    ConicModel model;
    const int m = inst.n_agents;
    const int n_edges = static_cast<int>(graph.edges.size());
    const double vmax = inst.v_max;

    for (int e = 0; e < n_edges; ++e) {
        const GraphEdge &edge = graph.edges[e];
        const bool tail_is_depot = edge.tail == graph.depot_start();
        const std::string es = "_e" + std::to_string(e);
        VarRef y = model.add_var("y" + es, 0.0, 1.0, /*is_binary=*/true);
        VarRef l = model.add_var("l" + es, 0.0, kInf);
        VarRef lx = model.add_var("lxy" + es + "_x", -kInf, kInf);
        VarRef ly = model.add_var("lxy" + es + "_y", -kInf, kInf);
        // An activated time y * t has no meaning until its window rows tie it
        // to y; the depot tail is the one window that is a single point, so it
        // is pinned by bounds instead of rows.
        VarRef ztt = tail_is_depot ? model.add_var("ztail_t" + es, 0.0, 0.0)
                                   : model.add_var("ztail_t" + es, -kInf, kInf);
        VarRef zht = model.add_var("zhead_t" + es, -kInf, kInf);
        VarRef ztp_x = model.add_var("ztail_p" + es + "_x", -kInf, kInf);
        VarRef ztp_y = model.add_var("ztail_p" + es + "_y", -kInf, kInf);
        VarRef zhp_x = model.add_var("zhead_p" + es + "_x", -kInf, kInf);
        VarRef zhp_y = model.add_var("zhead_p" + es + "_y", -kInf, kInf);
        model.set_label({VarRole::FlowY, e, -1, 0}, y);
        model.set_label({VarRole::CostL, e, -1, 0}, l);
        model.set_label({VarRole::CostLxy, e, -1, 0}, lx);
        model.set_label({VarRole::CostLxy, e, -1, 1}, ly);
        model.set_label({VarRole::ZTimeTail, e, -1, 0}, ztt);
        model.set_label({VarRole::ZTimeHead, e, -1, 0}, zht);
        model.set_label({VarRole::ZPosTail, e, -1, 0}, ztp_x);
        model.set_label({VarRole::ZPosTail, e, -1, 1}, ztp_y);
        model.set_label({VarRole::ZPosHead, e, -1, 0}, zhp_x);
        model.set_label({VarRole::ZPosHead, e, -1, 1}, zhp_y);
        model.objective.push_back({l, 1.0});
    }
    VarRef alpha = model.add_var("alpha", 1.0, static_cast<double>(m));
    model.set_label({VarRole::Alpha, 0, -1, 0}, alpha);

    auto y_of = [&](int e) { return model.var({VarRole::FlowY, e, -1, 0}); };

    // Depot out-flow and in-flow both equal the number of deployed agents.
    {
        LinearRow depart;
        depart.name = "depart";
        for (int e : graph.out_edges[graph.depot_start()]) add_term(depart, y_of(e), 1.0);
        add_term(depart, alpha, -1.0);
        depart.sense = RowSense::Equal;
        depart.rhs = 0.0;
        model.rows.push_back(depart);

        LinearRow arrive;
        arrive.name = "arrive";
        for (int e : graph.in_edges[graph.depot_end()]) add_term(arrive, y_of(e), 1.0);
        add_term(arrive, alpha, -1.0);
        arrive.sense = RowSense::Equal;
        arrive.rhs = 0.0;
        model.rows.push_back(arrive);
    }

    // Every target is intercepted exactly once.
    for (const auto &[target_id, cluster] : graph.clusters) {
        LinearRow visit;
        visit.name = "visit_u" + std::to_string(target_id);
        for (int i : cluster)
            for (int e : graph.in_edges[i]) add_term(visit, y_of(e), 1.0);
        visit.sense = RowSense::Equal;
        visit.rhs = 1.0;
        model.rows.push_back(visit);
    }

    // Selector flow and activated-time flow agree at every segment node: the
    // head time of the incoming edge is the tail time of the outgoing one.
    for (int i = 1; i <= graph.n_segments; ++i) {
        LinearRow flow_y;
        flow_y.name = "flow_y_v" + std::to_string(i);
        for (int e : graph.in_edges[i]) add_term(flow_y, y_of(e), 1.0);
        for (int e : graph.out_edges[i]) add_term(flow_y, y_of(e), -1.0);
        flow_y.sense = RowSense::Equal;
        flow_y.rhs = 0.0;
        model.rows.push_back(flow_y);

        LinearRow flow_t;
        flow_t.name = "flow_t_v" + std::to_string(i);
        for (int e : graph.in_edges[i])
            add_term(flow_t, model.var({VarRole::ZTimeHead, e, -1, 0}), 1.0);
        for (int e : graph.out_edges[i])
            add_term(flow_t, model.var({VarRole::ZTimeTail, e, -1, 0}), -1.0);
        flow_t.sense = RowSense::Equal;
        flow_t.rhs = 0.0;
        model.rows.push_back(flow_t);
    }

    for (int e = 0; e < n_edges; ++e) {
        const GraphEdge &edge = graph.edges[e];
        NodeMotion tail = node_motion(inst, graph, edge.tail);
        NodeMotion head = node_motion(inst, graph, edge.head);
        const bool tail_is_depot = edge.tail == graph.depot_start();
        const std::string es = "_e" + std::to_string(e);
        VarRef y = y_of(e);
        VarRef l = model.var({VarRole::CostL, e, -1, 0});
        VarRef ztt = model.var({VarRole::ZTimeTail, e, -1, 0});
        VarRef zht = model.var({VarRole::ZTimeHead, e, -1, 0});

        // Activated times live in the scaled window [y*t_lo, y*t_hi]; both
        // collapse to zero with the selector.
        if (!tail_is_depot) {
            LinearRow lo;
            lo.name = "win_lo_tail" + es;
            add_term(lo, y, tail.t_lo);
            add_term(lo, ztt, -1.0);
            lo.sense = RowSense::LessEqual;
            lo.rhs = 0.0;
            model.rows.push_back(lo);

            LinearRow hi;
            hi.name = "win_hi_tail" + es;
            add_term(hi, ztt, 1.0);
            add_term(hi, y, -tail.t_hi);
            hi.sense = RowSense::LessEqual;
            hi.rhs = 0.0;
            model.rows.push_back(hi);
        }
        {
            LinearRow lo;
            lo.name = "win_lo_head" + es;
            add_term(lo, y, head.t_lo);
            add_term(lo, zht, -1.0);
            lo.sense = RowSense::LessEqual;
            lo.rhs = 0.0;
            model.rows.push_back(lo);

            LinearRow hi;
            hi.name = "win_hi_head" + es;
            add_term(hi, zht, 1.0);
            add_term(hi, y, -head.t_hi);
            hi.sense = RowSense::LessEqual;
            hi.rhs = 0.0;
            model.rows.push_back(hi);
        }

        // Activated positions follow the node's linear motion law, scaled by y.
        for (int c = 0; c < 2; ++c) {
            LinearRow pos_tail;
            pos_tail.name = "pos_tail" + es + comp_suffix(c);
            add_term(pos_tail, model.var({VarRole::ZPosTail, e, -1, c}), 1.0);
            add_term(pos_tail, ztt, -tail.v[c]);
            add_term(pos_tail, y, -tail.base[c]);
            pos_tail.sense = RowSense::Equal;
            pos_tail.rhs = 0.0;
            model.rows.push_back(pos_tail);

            LinearRow pos_head;
            pos_head.name = "pos_head" + es + comp_suffix(c);
            add_term(pos_head, model.var({VarRole::ZPosHead, e, -1, c}), 1.0);
            add_term(pos_head, zht, -head.v[c]);
            add_term(pos_head, y, -head.base[c]);
            pos_head.sense = RowSense::Equal;
            pos_head.rhs = 0.0;
            model.rows.push_back(pos_head);
        }

        // Traversed length fits in the activated time difference; unused edges
        // force l = 0 through the cone and this row.
        LinearRow speed;
        speed.name = "speed" + es;
        add_term(speed, l, 1.0);
        add_term(speed, ztt, vmax);
        add_term(speed, zht, -vmax);
        speed.sense = RowSense::LessEqual;
        speed.rhs = 0.0;
        model.rows.push_back(speed);

        for (int c = 0; c < 2; ++c) {
            LinearRow len;
            len.name = "len" + es + comp_suffix(c);
            add_term(len, model.var({VarRole::CostLxy, e, -1, c}), 1.0);
            add_term(len, model.var({VarRole::ZPosHead, e, -1, c}), -1.0);
            add_term(len, model.var({VarRole::ZPosTail, e, -1, c}), 1.0);
            len.sense = RowSense::Equal;
            len.rhs = 0.0;
            model.rows.push_back(len);
        }

        SocRow cone;
        cone.name = "cone" + es;
        cone.vec.resize(2);
        cone.vec[0].terms.push_back({model.var({VarRole::CostLxy, e, -1, 0}), 1.0});
        cone.vec[1].terms.push_back({model.var({VarRole::CostLxy, e, -1, 1}), 1.0});
        cone.scalar.terms.push_back({l, 1.0});
        model.soc_rows.push_back(cone);
    }
    return model;
}

ConicModel build_formulation(FormulationKind kind, const Instance &inst,
                             const SegmentGraph &graph) {
    return kind == FormulationKind::Baseline ? build_baseline(inst, graph)
                                             : build_new_micp(inst, graph);
}

} // namespace mamt
