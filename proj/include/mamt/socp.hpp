#pragma once

#include "mamt/conic_model.hpp"

#include <string>
#include <vector>

namespace mamt {

enum class RelaxStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

std::string to_string(RelaxStatus status);

struct SocpOptions {
    double feas_tol = 1e-7;
    double gap_tol = 1e-8;
    int max_iter = 200;
    bool verbose = false;
};

struct RelaxResult {
    RelaxStatus status = RelaxStatus::NumericalFailure;
    double objective = 0.0;      // +inf when Infeasible, -inf when Unbounded
    double dual_objective = 0.0; // lower bound on the optimum when Optimal
    std::vector<double> solution;
    double max_primal_residual = 0.0;
    double rel_duality_gap = 0.0;
    int iterations = 0;
};

/// Solves the continuous relaxation of the model (integrality marks are
/// ignored) with a primal-dual interior-point method on the homogeneous
/// self-dual embedding. Deterministic and single-threaded.
RelaxResult solve_relaxation(const ConicModel &model, const SocpOptions &opts = {});

} // namespace mamt
