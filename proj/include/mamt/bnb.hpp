#pragma once

#include "mamt/conic_model.hpp"
#include "mamt/socp.hpp"

#include <map>
#include <string>
#include <vector>

namespace mamt {

/// One open node of the search tree: bound fixings applied on top of the base
/// model, plus the relaxation bound inherited from the parent.
struct BnbNode {
    std::map<VarRef, int> fixings; // binary VarRef -> 0/1
    double parent_bound = -kInf;
    long seq = 0; // insertion order; FIFO tie-break for equal bounds
};

/// Copy of the model with each fixed binary pinned by collapsed bounds.
ConicModel apply_fixings(const ConicModel &model, const std::map<VarRef, int> &fixings);

enum class MipStatus {
    Optimal,     // incumbent proven within rel_gap_tol
    Feasible,    // limit hit with an incumbent in hand
    Infeasible,  // search exhausted with no feasible point
    NoIncumbent, // limit hit before any incumbent was found
};

std::string to_string(MipStatus status);

struct MipOptions {
    double rel_gap_tol = 1e-4;  // terminate when (c_f - c_lb)/max(|c_f|,1e-10) <= this
    double time_limit_s = 1800.0;
    double int_tol = 1e-6;      // binary counts as integral within this of {0,1}
    long node_limit = -1;       // -1 = unlimited
    bool deterministic = true;  // single-threaded, reproducible search order
    SocpOptions relax_opts;     // node relaxation tolerances
    bool verbose = false;
};

struct SolveReport {
    MipStatus status = MipStatus::NoIncumbent;
    double incumbent_objective = std::numeric_limits<double>::quiet_NaN(); // c_f
    double best_bound = -kInf;                                            // c_lb
    double gap_percent = std::numeric_limits<double>::quiet_NaN();
    long nodes_explored = 0;
    double runtime_s = 0.0;
    std::vector<double> incumbent_solution; // empty when no incumbent
    int numerical_failures = 0;             // relaxations that neither solved nor proved anything
};

/// Relative optimality gap in percent, |c_f - c_lb| / |c_f| * 100.
/// Near-zero incumbents: 0 when the bound agrees to 1e-12, +inf otherwise.
double gap_percent(double c_f, double c_lb);

/// Best-first branch-and-bound over the model's binary variables with conic
/// relaxations at every node. Branches on the most fractional binary
/// (lowest index on ties); nodes with equal bounds pop in insertion order.
/// Integral relaxations are re-solved with every binary pinned so the
/// incumbent passes check_assignment at 1e-6.
SolveReport solve_mip(const ConicModel &model, const MipOptions &opts = {});

} // namespace mamt
