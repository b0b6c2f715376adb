#pragma once

#include "mamt/instance.hpp"

#include <map>
#include <string>
#include <vector>

namespace mamt {

enum class NodeKind { DepotStart, Segment, DepotEnd };

struct NodeId {
    NodeKind kind = NodeKind::Segment;
    int seg_id = 0; // valid when kind == Segment

    bool operator==(const NodeId &o) const { return kind == o.kind && seg_id == o.seg_id; }
};

std::string to_string(const NodeId &node);
NodeId parse_node_id(const std::string &text); // inverse of to_string; throws

/// Directed edge between dense node indices; the edge's position in
/// SegmentGraph::edges is its dense index.
struct GraphEdge {
    int tail = 0;
    int head = 0;
};

/// The routing graph over segment nodes plus the depot pair.
///
/// Node indices: 0 is the depot start s, 1..n_segments are the segment nodes
/// (index == segment id), n_segments+1 is the depot end s'. Edges are sorted
/// by (tail, head) so identical instances always get identical edge indices.
struct SegmentGraph {
    int n_segments = 0;
    std::vector<GraphEdge> edges;
    std::vector<std::vector<int>> in_edges;  // per node, edge indices
    std::vector<std::vector<int>> out_edges;
    std::map<int, std::vector<int>> clusters; // target_id -> segment node indices

    int depot_start() const { return 0; }
    int depot_end() const { return n_segments + 1; }
    int node_count() const { return n_segments + 2; }
    int edge_count() const { return static_cast<int>(edges.size()); }
    bool is_segment_node(int node) const { return node >= 1 && node <= n_segments; }
    NodeId node_id(int node) const;
};

/// Builds the graph: s -> every segment node, segment -> segment across
/// clusters in both directions, every segment node -> s'.
SegmentGraph build_graph(const Instance &inst);

/// Edge-list text, one "tail head" pair per line (s and s' spelled out).
std::string dump_edge_list(const SegmentGraph &graph);

} // namespace mamt
