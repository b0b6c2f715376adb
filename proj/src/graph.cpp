#include "mamt/graph.hpp"

#include <sstream>
#include <stdexcept>

namespace mamt {

std::string to_string(const NodeId &node) {
    switch (node.kind) {
    case NodeKind::DepotStart: return "s";
    case NodeKind::DepotEnd: return "s'";
    case NodeKind::Segment: return "v" + std::to_string(node.seg_id);
    }
    return "?";
}

NodeId parse_node_id(const std::string &text) {
    if (text == "s") return {NodeKind::DepotStart, 0};
    if (text == "s'") return {NodeKind::DepotEnd, 0};
    if (text.size() > 1 && text[0] == 'v') {
        try {
            return {NodeKind::Segment, std::stoi(text.substr(1))};
        } catch (const std::exception &) {
        }
    }
    throw std::invalid_argument("not a node name: '" + text + "'");
}

NodeId SegmentGraph::node_id(int node) const {
    if (node == depot_start()) return {NodeKind::DepotStart, 0};
    if (node == depot_end()) return {NodeKind::DepotEnd, 0};
    if (!is_segment_node(node)) throw std::out_of_range("node index out of range");
    return {NodeKind::Segment, node};
}

SegmentGraph build_graph(const Instance &inst) {
    SegmentGraph g;
    g.n_segments = inst.n_segments();

    // Segment ids are dense 1..n, so node index == segment id.
    std::vector<int> seg_target(g.n_segments + 1, 0);
    for (const auto &target : inst.targets) {
        for (const auto &seg : target.segments) {
            if (seg.id < 1 || seg.id > g.n_segments || seg_target[seg.id] != 0)
                throw std::invalid_argument("segment ids must be dense 1..n");
            seg_target[seg.id] = target.id;
            g.clusters[target.id].push_back(seg.id);
        }
    }

    // Edges sorted by (tail, head): depot-start edges first (tail 0), then
    // segment rows in node order, each ending with its edge to s'.
    for (int j = 1; j <= g.n_segments; ++j) g.edges.push_back({0, j});
    for (int i = 1; i <= g.n_segments; ++i) {
        for (int j = 1; j <= g.n_segments; ++j)
            if (seg_target[i] != seg_target[j]) g.edges.push_back({i, j});
        g.edges.push_back({i, g.depot_end()});
    }

    g.in_edges.assign(g.node_count(), {});
    g.out_edges.assign(g.node_count(), {});
    for (int e = 0; e < g.edge_count(); ++e) {
        g.out_edges[g.edges[e].tail].push_back(e);
        g.in_edges[g.edges[e].head].push_back(e);
    }
    return g;
}

std::string dump_edge_list(const SegmentGraph &graph) {
    std::ostringstream out;
    for (const auto &edge : graph.edges)
        out << to_string(graph.node_id(edge.tail)) << ' '
            << to_string(graph.node_id(edge.head)) << '\n';
    return out.str();
}

} // namespace mamt
