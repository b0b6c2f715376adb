#include <doctest.h>

#include "helpers.hpp"
#include "mamt/graph.hpp"

#include <set>

using namespace mamt;
using mamt::testing::random_instance;
using mamt::testing::single_segment_targets;

namespace {

Instance grid_instance(int n_targets, int segs_per_target) {
    Instance inst;
    inst.depot = {0, 0};
    inst.v_max = 4.0;
    inst.horizon = 150.0;
    inst.arena_side = 100.0;
    for (int u = 1; u <= n_targets; ++u) {
        Target target;
        target.id = u;
        double t = 0.0;
        for (int c = 0; c < segs_per_target; ++c) {
            const double step = 150.0 / segs_per_target;
            target.segments.push_back(make_segment(
                0, u, t, t + step * 0.9, {double(u), double(c)}, {double(u), double(c) + 1.0}));
            t += step;
        }
        inst.targets.push_back(target);
    }
    assign_segment_ids(inst);
    return inst;
}

/// Edge count straight from the definition: s->all, cross-cluster pairs,
/// all->s'. Used as an independent check of the builder.
int count_edges_by_definition(const Instance &inst) {
    int count = 2 * inst.n_segments();
    for (const auto &a : inst.targets)
        for (const auto &b : inst.targets)
            if (a.id != b.id) count += int(a.segments.size() * b.segments.size());
    return count;
}

} // namespace

TEST_CASE("single segment graph") {
    const Instance inst =
        single_segment_targets({0, 0}, 4.0, 150.0, 100.0, {{0.0, 150.0, {10, 0}, {12, 0}}});
    const SegmentGraph g = build_graph(inst);
    CHECK(g.n_segments == 1);
    CHECK(g.node_count() == 3);
    REQUIRE(g.edge_count() == 2);
    CHECK(g.edges[0].tail == g.depot_start());
    CHECK(g.edges[0].head == 1);
    CHECK(g.edges[1].tail == 1);
    CHECK(g.edges[1].head == g.depot_end());
}

TEST_CASE("edge counts match the closed form") {
    struct Case {
        int targets, segs, expected;
    };
    // |E| = 2|V_seg| + sum_u |C_u| (|V_seg| - |C_u|)
    const Case cases[] = {
        {2, 2, 16},   // 2*4 + 2*(2*2) = 16
        {5, 2, 100},  // 2*10 + 5*(2*8) = 100
        {3, 1, 12},   // 2*3 + 3*(1*2) = 12
    };
    for (const auto &c : cases) {
        CAPTURE(c.targets);
        const Instance inst = grid_instance(c.targets, c.segs);
        const SegmentGraph g = build_graph(inst);
        CHECK(g.edge_count() == c.expected);
        CHECK(g.edge_count() == count_edges_by_definition(inst));
    }
}

TEST_CASE("edge set follows the construction rules") {
    const Instance inst = random_instance(3, 4, 3);
    const SegmentGraph g = build_graph(inst);

    std::set<std::pair<int, int>> seen;
    for (const auto &e : g.edges) {
        CHECK(seen.insert({e.tail, e.head}).second); // no duplicates
        CHECK(e.tail != g.depot_end());
        CHECK(e.head != g.depot_start());
        // No depot-to-depot edge.
        CHECK_FALSE((e.tail == g.depot_start() && e.head == g.depot_end()));
        if (g.is_segment_node(e.tail) && g.is_segment_node(e.head)) {
            CHECK(inst.segment(e.tail).target_id != inst.segment(e.head).target_id);
        }
    }
    CHECK(g.edge_count() == count_edges_by_definition(inst));

    // Edges sorted by (tail, head) so indexing is reproducible.
    for (int e = 1; e < g.edge_count(); ++e) {
        const auto a = std::make_pair(g.edges[e - 1].tail, g.edges[e - 1].head);
        const auto b = std::make_pair(g.edges[e].tail, g.edges[e].head);
        CHECK(a < b);
    }
}

TEST_CASE("adjacency degrees per segment node") {
    const Instance inst = grid_instance(4, 2);
    const SegmentGraph g = build_graph(inst);
    // Every segment node: |in| = |out| = |V_seg| - |C_tau| + 1.
    for (int node = 1; node <= g.n_segments; ++node) {
        const int cluster = int(g.clusters.at(inst.segment(node).target_id).size());
        const int expected = g.n_segments - cluster + 1;
        CHECK(int(g.in_edges[node].size()) == expected);
        CHECK(int(g.out_edges[node].size()) == expected);
    }
    CHECK(int(g.out_edges[g.depot_start()].size()) == g.n_segments);
    CHECK(int(g.in_edges[g.depot_end()].size()) == g.n_segments);
    CHECK(g.in_edges[g.depot_start()].empty());
    CHECK(g.out_edges[g.depot_end()].empty());
}

TEST_CASE("graph build is deterministic") {
    const Instance inst = random_instance(11, 4, 2);
    const SegmentGraph g1 = build_graph(inst);
    const SegmentGraph g2 = build_graph(inst);
    REQUIRE(g1.edge_count() == g2.edge_count());
    for (int e = 0; e < g1.edge_count(); ++e) {
        CHECK(g1.edges[e].tail == g2.edges[e].tail);
        CHECK(g1.edges[e].head == g2.edges[e].head);
    }
}

TEST_CASE("edge list dump") {
    const Instance inst =
        single_segment_targets({0, 0}, 4.0, 150.0, 100.0, {{0.0, 150.0, {10, 0}, {12, 0}}});
    const SegmentGraph g = build_graph(inst);
    CHECK(dump_edge_list(g) == "s v1\nv1 s'\n");
}
