#pragma once

#include "mamt/conic_model.hpp"
#include "mamt/graph.hpp"
#include "mamt/instance.hpp"

#include <string>

namespace mamt {

enum class FormulationKind { Baseline, NewMicp };

std::string to_string(FormulationKind kind);
FormulationKind parse_formulation(const std::string &name); // "baseline" | "micp"

/// Big-M formulation with one variable/constraint block per agent.
///
/// Per agent k and edge e: selector y (binary), length l >= 0, displacement
/// lxy (2), shifted length lbar >= 0. Per agent and node: visit time t with
/// the node's window as variable bounds (depot start pinned to 0, depot end
/// within [0, horizon]). Rows per agent: depot departure/arrival caps (2),
/// flow conservation per segment node, and per edge: a travel-time row with
/// horizon slack, two displacement-definition equalities, one shifted-length
/// equality, and one cone ||lxy|| <= lbar.
/// Variable count: m * (5|E| + |V|). Lengths couple to times through the
/// targets' linear motion, so node positions never appear as variables.
ConicModel build_baseline(const Instance &inst, const SegmentGraph &graph);

/// Agent-count-independent formulation over a single set of edge variables.
///
/// Per edge e: selector y (binary), length l >= 0, displacement lxy (2),
/// activated tail/head times ztail_t / zhead_t, activated tail/head positions
/// ztail_p / zhead_p (2 each); plus one shared depot-flow variable alpha in
/// [1, m] (its integrality follows from the binary selectors). Rows: depot
/// out-flow = alpha = depot in-flow, one visit row per target, selector and
/// time conservation per segment node, per edge: window rows tying activated
/// times to y (the tail side of depot-out edges is pinned to 0 by bounds
/// instead), position-definition equalities, a speed row, displacement
/// equalities, and the cone ||lxy|| <= l.
/// Variable count: 10|E| + 1, independent of m.
ConicModel build_new_micp(const Instance &inst, const SegmentGraph &graph);

ConicModel build_formulation(FormulationKind kind, const Instance &inst,
                             const SegmentGraph &graph);

} // namespace mamt
