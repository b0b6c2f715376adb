#include "mamt/bnb.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <queue>
#include <stdexcept>

namespace mamt {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct NodeOrder {
    // Min-heap: smallest parent bound first, then insertion order.
    bool operator()(const BnbNode &a, const BnbNode &b) const {
        if (a.parent_bound != b.parent_bound) return a.parent_bound > b.parent_bound;
        return a.seq > b.seq;
    }
};

// Most fractional binary: largest distance to the nearest integer, lowest
// index on ties. Returns -1 when everything is within int_tol of {0,1}.
int most_fractional(const std::vector<VarRef> &binaries, const std::vector<double> &x,
                    double int_tol) {
    int best = -1;
    double best_frac = int_tol;
    for (VarRef v : binaries) {
        const double val = x[static_cast<size_t>(v)];
        const double frac = std::fabs(val - std::round(val));
        if (frac > best_frac) {
            best_frac = frac;
            best = v;
        }
    }
    return best;
}

int first_unfixed(const std::vector<VarRef> &binaries, const std::map<VarRef, int> &fixings) {
    for (VarRef v : binaries)
        if (!fixings.count(v)) return v;
    return -1;
}

} // namespace

ConicModel apply_fixings(const ConicModel &model, const std::map<VarRef, int> &fixings) {
    ConicModel out = model;
    for (const auto &[var, value] : fixings) {
        auto &def = out.vars.at(static_cast<size_t>(var));
        def.lower = static_cast<double>(value);
        def.upper = static_cast<double>(value);
    }
    return out;
}

std::string to_string(MipStatus status) {
    switch (status) {
    case MipStatus::Optimal: return "optimal";
    case MipStatus::Feasible: return "feasible";
    case MipStatus::Infeasible: return "infeasible";
    case MipStatus::NoIncumbent: return "no_incumbent";
    }
    return "unknown";
}

double gap_percent(double c_f, double c_lb) {
    const double diff = std::fabs(c_f - c_lb);
    if (std::fabs(c_f) < 1e-12) return diff < 1e-12 ? 0.0 : kInf;
    return diff / std::fabs(c_f) * 100.0;
}

SolveReport solve_mip(const ConicModel &model, const MipOptions &opts) {
    const auto start = Clock::now();
    SolveReport report;

    std::vector<VarRef> binaries;
    for (int v = 0; v < model.n_vars(); ++v)
        if (model.vars[static_cast<size_t>(v)].is_binary) binaries.push_back(v);

    std::priority_queue<BnbNode, std::vector<BnbNode>, NodeOrder> open;
    open.push(BnbNode{});
    long next_seq = 1;

    bool have_incumbent = false;
    double c_f = kInf;
    std::vector<double> best_x;
    bool hit_limit = false;
    double lb_at_exit = -kInf;

    auto finish = [&](MipStatus status, double bound) {
        report.status = status;
        report.best_bound = bound;
        if (have_incumbent) {
            report.incumbent_objective = c_f;
            report.incumbent_solution = best_x;
            report.gap_percent = gap_percent(c_f, bound);
        }
        report.runtime_s = seconds_since(start);
        return report;
    };

    while (!open.empty()) {
        BnbNode node = open.top();

        // The queue minimum is the global lower bound (never above c_f).
        const double lb_now = have_incumbent ? std::min(node.parent_bound, c_f)
                                             : node.parent_bound;
        if (have_incumbent &&
            (c_f - lb_now) / std::max(std::fabs(c_f), 1e-10) <= opts.rel_gap_tol)
            return finish(MipStatus::Optimal, lb_now);
        if (opts.node_limit >= 0 && report.nodes_explored >= opts.node_limit) {
            hit_limit = true;
            lb_at_exit = lb_now;
            break;
        }
        if (seconds_since(start) > opts.time_limit_s) {
            hit_limit = true;
            lb_at_exit = lb_now;
            break;
        }
        open.pop();
        ++report.nodes_explored;

        ConicModel node_model = apply_fixings(model, node.fixings);
        RelaxResult res = solve_relaxation(node_model, opts.relax_opts);

        auto branch_on = [&](VarRef v, double bound) {
            for (int value : {0, 1}) {
                BnbNode child;
                child.fixings = node.fixings;
                child.fixings[v] = value;
                child.parent_bound = std::max(bound, node.parent_bound);
                child.seq = next_seq++;
                open.push(std::move(child));
            }
        };

        if (res.status == RelaxStatus::Infeasible) continue;
        if (res.status == RelaxStatus::NumericalFailure) {
            ++report.numerical_failures;
            continue;
        }
        if (res.status == RelaxStatus::Unbounded) {
            // Keep searching: fixing more binaries can restore boundedness.
            int v = first_unfixed(binaries, node.fixings);
            if (v >= 0) branch_on(v, node.parent_bound);
            continue;
        }

        const double bound = res.objective;
        if (opts.verbose)
            std::printf("node %6ld  bound %.9e  incumbent %.9e  open %zu\n",
                        report.nodes_explored, bound, have_incumbent ? c_f : kInf,
                        open.size());
        if (have_incumbent && bound >= c_f) continue;

        int frac_var = most_fractional(binaries, res.solution, opts.int_tol);
        if (frac_var >= 0) {
            branch_on(frac_var, bound);
            continue;
        }

        // Integral relaxation: pin every binary to its rounded value and
        // re-solve so the incumbent is clean enough for check_assignment.
        std::map<VarRef, int> pinned = node.fixings;
        for (VarRef v : binaries)
            pinned[v] = static_cast<int>(std::lround(res.solution[static_cast<size_t>(v)]));
        SocpOptions clean_opts = opts.relax_opts;
        clean_opts.feas_tol = std::min(clean_opts.feas_tol, 1e-9);
        clean_opts.gap_tol = std::min(clean_opts.gap_tol, 1e-9);
        RelaxResult clean = solve_relaxation(apply_fixings(model, pinned), clean_opts);
        if (clean.status == RelaxStatus::Optimal &&
            check_assignment(model, clean.solution, 1e-6).feasible) {
            if (!have_incumbent || clean.objective < c_f) {
                have_incumbent = true;
                c_f = clean.objective;
                best_x = clean.solution;
            }
            continue;
        }
        if (clean.status == RelaxStatus::NumericalFailure) ++report.numerical_failures;
        // Could not certify the rounded point; keep splitting if possible.
        int v = first_unfixed(binaries, node.fixings);
        if (v >= 0) branch_on(v, bound);
    }

    if (hit_limit)
        return finish(have_incumbent ? MipStatus::Feasible : MipStatus::NoIncumbent,
                      lb_at_exit);
    // Queue exhausted: the search proved the incumbent optimal (or the model
    // infeasible).
    if (have_incumbent) return finish(MipStatus::Optimal, c_f);
    return finish(MipStatus::Infeasible, kInf);
}

} // namespace mamt
