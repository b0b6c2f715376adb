// Acceptance gate for the solver stack. Each numbered check prints exactly one
// PASS/FAIL line; the process exits nonzero if any check fails. Tolerances are
// pinned here so a regression cannot loosen them silently.

#include "mamt/bench.hpp"
#include "mamt/bnb.hpp"
#include "mamt/formulations.hpp"
#include "mamt/instance_gen.hpp"
#include "mamt/oracle.hpp"
#include "mamt/recovery.hpp"
#include "mamt/rng.hpp"
#include "mamt/socp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace mamt;

namespace {

constexpr double kRelTolObjective = 1e-4;  // checks 1-3: objective agreement
constexpr double kTourTol = 1e-6;          // checks 2/4: visit-level feasibility
constexpr double kRelTolLength = 1e-5;     // check 4: total length vs objective
constexpr double kGapFormulaTol = 1e-9;    // check 5
constexpr double kSocpTol = 1e-7;          // check 6
constexpr double kOracleBatchBudgetS = 600.0; // check 1: whole-batch wall clock
constexpr double kSmokeTimeLimitS = 300.0;    // check 8: per-formulation budget
constexpr double kSmokeGapPercent = 1e-4 * 100.0;

int g_failures = 0;

void report(int number, const char *title, bool pass, const std::string &detail) {
    std::printf("%s  check %d (%s): %s\n", pass ? "PASS" : "FAIL", number, title,
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

bool rel_close(double a, double b, double rel_tol) {
    return std::abs(a - b) <= rel_tol * std::max({1.0, std::abs(a), std::abs(b)});
}

struct SolvedCase {
    std::string id;
    Instance inst;
    double oracle_objective = 0.0;
    SolveReport micp;
    SolveReport baseline;
    Solution micp_sol;
    Solution baseline_sol;
};

// Shared fixture for checks 1, 2, and 4: seeded instances across the small
// grid, solved by the exhaustive oracle and by both formulations.
std::vector<SolvedCase> solve_small_grid(double &oracle_plus_micp_seconds) {
    std::vector<SolvedCase> cases;
    double timed = 0.0;
    for (int n : {2, 3, 4}) {
        for (int m : {1, 2}) {
            for (std::uint64_t seed : {1, 2, 3, 4}) {
                GenConfig cfg;
                cfg.n_targets = n;
                cfg.n_agents = m;
                cfg.total_window_duration = 40.0;
                cfg.seed = seed;
                SolvedCase c;
                c.id = "n" + std::to_string(n) + "-m" + std::to_string(m) + "-s" +
                       std::to_string(seed);
                c.inst = generate_instance(cfg);
                const SegmentGraph graph = build_graph(c.inst);

                const auto a = std::chrono::steady_clock::now();
                c.oracle_objective = brute_force_optimum(c.inst).objective;
                ConicModel micp = build_new_micp(c.inst, graph);
                MipOptions opts;
                opts.rel_gap_tol = 1e-6;
                c.micp = solve_mip(micp, opts);
                const auto b = std::chrono::steady_clock::now();
                timed += std::chrono::duration<double>(b - a).count();

                ConicModel base = build_baseline(c.inst, graph);
                c.baseline = solve_mip(base, opts);
                if (!c.micp.incumbent_solution.empty())
                    c.micp_sol = recover_tours(c.inst, graph, micp, c.micp.incumbent_solution);
                if (!c.baseline.incumbent_solution.empty())
                    c.baseline_sol =
                        recover_tours(c.inst, graph, base, c.baseline.incumbent_solution);
                cases.push_back(std::move(c));
            }
        }
    }
    oracle_plus_micp_seconds = timed;
    return cases;
}

void check_1_oracle_equivalence(const std::vector<SolvedCase> &cases, double batch_s) {
    int bad = 0;
    double worst = 0.0;
    for (const auto &c : cases) {
        if (c.micp.status != MipStatus::Optimal) {
            ++bad;
            continue;
        }
        const double rel = std::abs(c.micp.incumbent_objective - c.oracle_objective) /
                           std::max(1.0, std::abs(c.oracle_objective));
        worst = std::max(worst, rel);
        if (rel > kRelTolObjective) ++bad;
    }
    std::ostringstream d;
    d << cases.size() << " instances, worst relative deviation " << worst << ", batch "
      << batch_s << " s";
    report(1, "solver matches the exhaustive oracle", bad == 0 && batch_s < kOracleBatchBudgetS,
           d.str());
}

void check_2_formulations_agree(const std::vector<SolvedCase> &cases) {
    int bad = 0;
    double worst = 0.0;
    int findings = 0;
    for (const auto &c : cases) {
        if (c.baseline.status != MipStatus::Optimal || c.micp.status != MipStatus::Optimal) {
            ++bad;
            continue;
        }
        const double rel =
            std::abs(c.baseline.incumbent_objective - c.micp.incumbent_objective) /
            std::max(1.0, std::abs(c.micp.incumbent_objective));
        worst = std::max(worst, rel);
        if (rel > kRelTolObjective) ++bad;
        findings += static_cast<int>(validate_solution(c.inst, c.micp_sol, kTourTol).size());
        findings +=
            static_cast<int>(validate_solution(c.inst, c.baseline_sol, kTourTol).size());
    }
    std::ostringstream d;
    d << "worst cross-formulation deviation " << worst << ", validation findings "
      << findings;
    report(2, "both formulations agree and validate", bad == 0 && findings == 0, d.str());
}

void check_3_stationary_reduction() {
    int bad = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Rng rng(seed * 1000003ULL);
        Instance inst;
        inst.depot = {0.0, 0.0};
        inst.n_agents = 1;
        inst.v_max = 4.0;
        inst.horizon = 150.0;
        inst.arena_side = 100.0;
        std::vector<Point2> pts;
        for (int u = 1; u <= 5; ++u) {
            Target t;
            t.id = u;
            const Point2 p{rng.uniform(-45.0, 45.0), rng.uniform(-45.0, 45.0)};
            pts.push_back(p);
            t.segments.push_back(make_segment(0, u, 0.0, 150.0, p, p));
            inst.targets.push_back(t);
        }
        assign_segment_ids(inst);

        // Independent optimum: enumerate all visiting orders of fixed points.
        std::vector<int> order(pts.size());
        std::iota(order.begin(), order.end(), 0);
        double best = kInf;
        do {
            double len = 0.0;
            Point2 at{0.0, 0.0};
            for (int i : order) {
                len += distance(at, pts[static_cast<size_t>(i)]);
                at = pts[static_cast<size_t>(i)];
            }
            best = std::min(best, len + at.norm());
        } while (std::next_permutation(order.begin(), order.end()));

        MipOptions opts;
        opts.rel_gap_tol = 1e-6;
        SolveReport rep = solve_mip(build_new_micp(inst, build_graph(inst)), opts);
        if (rep.status != MipStatus::Optimal) {
            ++bad;
            continue;
        }
        const double rel = std::abs(rep.incumbent_objective - best) / std::max(1.0, best);
        worst = std::max(worst, rel);
        if (rel > kRelTolObjective) ++bad;
    }
    std::ostringstream d;
    d << "10 instances, worst relative deviation " << worst;
    report(3, "stationary targets reduce to the shortest fixed-point tour", bad == 0,
           d.str());
}

// Walks every recovered tour with independent arithmetic (no reuse of
// validate_solution) against the physical rules.
void check_4_feasibility(const std::vector<SolvedCase> &cases) {
    int bad = 0;
    std::string why;
    auto scold = [&](const std::string &msg) {
        if (why.empty()) why = msg;
        ++bad;
    };
    for (const auto &c : cases) {
        const std::pair<const SolveReport *, const Solution *> runs[] = {
            {&c.micp, &c.micp_sol}, {&c.baseline, &c.baseline_sol}};
        for (const auto &pair : runs) {
            const Solution &sol = *pair.second;
            if (sol.tours.empty()) {
                scold(c.id + ": missing recovered solution");
                continue;
            }
            std::map<int, int> visits;
            double total = 0.0;
            for (const Tour &tour : sol.tours) {
                total += tour.length;
                if (tour.visits.empty()) continue;
                if (std::abs(tour.visits.front().time) > kTourTol)
                    scold(c.id + ": departure not at time zero");
                for (size_t i = 0; i < tour.visits.size(); ++i) {
                    const Visit &v = tour.visits[i];
                    if (v.node.kind == NodeKind::Segment) {
                        const Segment &seg = c.inst.segment(v.node.seg_id);
                        ++visits[seg.target_id];
                        if (v.time < seg.t_start - kTourTol || v.time > seg.t_end + kTourTol)
                            scold(c.id + ": visit outside its window");
                    }
                    if (i == 0) continue;
                    const Visit &p = tour.visits[i - 1];
                    const double dt = v.time - p.time;
                    const double dist = distance(v.position, p.position);
                    if (dist > c.inst.v_max * (1.0 + 1e-6) * std::max(dt, 0.0) + 1e-12)
                        scold(c.id + ": leg faster than the speed cap");
                }
            }
            for (const Target &t : c.inst.targets)
                if (visits[t.id] != 1) scold(c.id + ": target not visited exactly once");
            if (!rel_close(total, pair.first->incumbent_objective, kRelTolLength))
                scold(c.id + ": tour length disagrees with the reported objective");
        }
    }
    std::ostringstream d;
    d << 2 * cases.size() << " recovered solutions";
    if (!why.empty()) d << ", first failure: " << why;
    report(4, "recovered tours are physically feasible", bad == 0, d.str());
}

void check_5_gap_formula() {
    bool ok = std::abs(gap_percent(110.0, 100.0) - 100.0 / 11.0) <= kGapFormulaTol;
    for (double c : {-3.5, 0.0, 1.0, 1e9})
        ok = ok && gap_percent(c, c) == 0.0;
    Rng rng(99);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double cf = rng.uniform(-100.0, 100.0);
        const double clb = rng.uniform(-100.0, 100.0);
        const double direct = std::abs(cf - clb) / std::abs(cf) * 100.0;
        worst = std::max(worst, std::abs(gap_percent(cf, clb) - direct));
    }
    ok = ok && worst <= kGapFormulaTol;
    std::ostringstream d;
    d << "gap(110,100) = " << gap_percent(110.0, 100.0)
      << ", worst random deviation " << worst;
    report(5, "optimality-gap formula", ok, d.str());
}

void check_6_socp_unit() {
    // min x  s.t.  ||(x - 3, 4)|| <= x; squaring gives x >= 25/6.
    ConicModel model;
    const VarRef x = model.add_var("x", -kInf, kInf);
    model.objective = {{x, 1.0}};
    SocRow cone;
    cone.vec.resize(2);
    cone.vec[0].terms = {{x, 1.0}};
    cone.vec[0].constant = -3.0;
    cone.vec[1].constant = 4.0;
    cone.scalar.terms = {{x, 1.0}};
    cone.name = "reach";
    model.soc_rows.push_back(cone);
    RelaxResult res = solve_relaxation(model);
    bool ok = res.status == RelaxStatus::Optimal &&
              std::abs(res.objective - 25.0 / 6.0) <= kSocpTol;

    // Classification battery: five infeasible and five unbounded programs.
    int classified = 0;
    auto expect = [&](const ConicModel &m, RelaxStatus want) {
        if (solve_relaxation(m).status == want) ++classified;
    };
    {
        ConicModel m; // contradictory equalities inside a wide box
        VarRef a = m.add_var("a", -10.0, 10.0);
        m.rows.push_back({{{a, 1.0}}, RowSense::Equal, 5.0, "r1"});
        m.rows.push_back({{{a, 1.0}}, RowSense::Equal, 3.0, "r2"});
        expect(m, RelaxStatus::Infeasible);
    }
    {
        ConicModel m; // bound box excludes the only row
        VarRef a = m.add_var("a", 0.0, 1.0);
        m.rows.push_back({{{a, 1.0}}, RowSense::GreaterEqual, 2.0, "r"});
        expect(m, RelaxStatus::Infeasible);
    }
    {
        ConicModel m; // two lower bounds cannot fit under the cap
        VarRef a = m.add_var("a", 2.0, kInf);
        VarRef b = m.add_var("b", 2.0, kInf);
        m.rows.push_back({{{a, 1.0}, {b, 1.0}}, RowSense::LessEqual, 1.0, "cap"});
        expect(m, RelaxStatus::Infeasible);
    }
    {
        ConicModel m; // cone with constant vector longer than its cap
        VarRef a = m.add_var("a", -kInf, kInf);
        SocRow c2;
        c2.vec.resize(2);
        c2.vec[0].terms = {{a, 1.0}};
        c2.vec[1].constant = 3.0;
        c2.scalar.constant = 2.0;
        m.soc_rows.push_back(c2);
        m.objective = {{a, 1.0}};
        expect(m, RelaxStatus::Infeasible);
    }
    {
        ConicModel m; // opposing inequalities
        VarRef a = m.add_var("a", -kInf, kInf);
        m.rows.push_back({{{a, 1.0}}, RowSense::GreaterEqual, 1.0, "hi"});
        m.rows.push_back({{{a, 1.0}}, RowSense::LessEqual, -1.0, "lo"});
        expect(m, RelaxStatus::Infeasible);
    }
    {
        ConicModel m; // free descent direction beside an inert slack
        VarRef a = m.add_var("a", -kInf, kInf);
        m.add_var("slack", 0.0, kInf);
        m.objective = {{a, 1.0}};
        expect(m, RelaxStatus::Unbounded);
    }
    {
        ConicModel m; // ray along a one-sided bound
        VarRef a = m.add_var("a", 0.0, kInf);
        m.objective = {{a, -1.0}};
        expect(m, RelaxStatus::Unbounded);
    }
    {
        ConicModel m; // descent inside an equality subspace
        VarRef a = m.add_var("a", -kInf, kInf);
        VarRef b = m.add_var("b", -kInf, kInf);
        m.add_var("slack", 0.0, kInf);
        m.rows.push_back({{{a, 1.0}, {b, -1.0}}, RowSense::Equal, 0.0, "tie"});
        m.objective = {{a, 1.0}, {b, 1.0}};
        expect(m, RelaxStatus::Unbounded);
    }
    {
        ConicModel m; // cone holds but the objective still has a ray
        VarRef a = m.add_var("a", -kInf, kInf);
        VarRef b = m.add_var("b", -kInf, kInf);
        SocRow c2;
        c2.vec.resize(2);
        c2.vec[0].terms = {{b, 1.0}};
        c2.vec[1].constant = 1.0;
        c2.scalar.terms = {{a, 1.0}};
        m.soc_rows.push_back(c2);
        m.objective = {{b, 1.0}, {a, -1.0}};
        expect(m, RelaxStatus::Unbounded);
    }
    {
        ConicModel m; // unbounded direction orthogonal to the only inequality
        VarRef a = m.add_var("a", -kInf, kInf);
        VarRef b = m.add_var("b", -kInf, kInf);
        m.rows.push_back({{{b, 1.0}}, RowSense::GreaterEqual, 0.0, "half"});
        m.objective = {{a, 1.0}};
        expect(m, RelaxStatus::Unbounded);
    }
    std::ostringstream d;
    d << "analytic objective " << res.objective << ", classifications " << classified
      << "/10";
    report(6, "conic solver analytic value and status classification",
           ok && classified == 10, d.str());
}

// Strips the runtime column (field 10 of 11; the ids used here contain no
// quoted separators) so the rest of the text can be compared byte for byte.
std::string without_runtime_column(const std::string &csv) {
    std::istringstream in(csv);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> fields;
        std::string cur;
        for (char ch : line) {
            if (ch == ',') {
                fields.push_back(cur);
                cur.clear();
            } else
                cur += ch;
        }
        fields.push_back(cur);
        if (fields.size() == 11) fields.erase(fields.begin() + 9);
        for (size_t i = 0; i < fields.size(); ++i)
            out << fields[i] << (i + 1 < fields.size() ? "," : "");
        out << "\n";
    }
    return out.str();
}

void check_7_bench_determinism() {
    std::vector<BenchJob> jobs;
    for (std::uint64_t seed : {1, 2}) {
        GenConfig cfg;
        cfg.n_targets = 3;
        cfg.total_window_duration = 40.0;
        cfg.seed = seed;
        jobs.push_back({"n3-d40-s" + std::to_string(seed), generate_instance(cfg), 40.0});
    }
    MipOptions opts;
    std::ostringstream csv_a, csv_b;
    std::vector<BenchRow> a =
        run_bench(jobs, {FormulationKind::Baseline, FormulationKind::NewMicp}, {1, 2},
                  opts, &csv_a);
    std::vector<BenchRow> b =
        run_bench(jobs, {FormulationKind::Baseline, FormulationKind::NewMicp}, {1, 2},
                  opts, &csv_b);
    const std::string diff = compare_rows(a, b);
    const bool bytes_equal =
        without_runtime_column(csv_a.str()) == without_runtime_column(csv_b.str());
    std::ostringstream d;
    d << a.size() << " rows; " << (diff.empty() ? "field diff: none" : diff)
      << (bytes_equal ? "; bytes identical outside runtime" : "; byte mismatch");
    report(7, "benchmark reruns are reproducible", diff.empty() && bytes_equal, d.str());
}

void check_8_scale_smoke() {
    GenConfig cfg;
    cfg.n_targets = 5;
    cfg.n_agents = 2;
    cfg.total_window_duration = 40.0;
    cfg.seed = 3;
    std::vector<BenchJob> jobs = {{"smoke-n5-m2", generate_instance(cfg), 40.0}};
    MipOptions opts;
    opts.time_limit_s = kSmokeTimeLimitS;
    std::ostringstream csv;
    std::vector<BenchRow> rows =
        run_bench(jobs, {FormulationKind::Baseline, FormulationKind::NewMicp}, {2}, opts,
                  &csv);
    bool ok = rows.size() == 2;
    std::ostringstream d;
    for (const BenchRow &r : rows) {
        const bool solved = (r.status == "optimal" || r.status == "feasible") &&
                            r.gap_percent <= kSmokeGapPercent &&
                            r.runtime_s <= kSmokeTimeLimitS;
        ok = ok && solved;
        d << r.formulation << ": " << r.status << " obj " << r.objective << ", "
          << r.nodes << " nodes, " << r.runtime_s << " s;  ";
    }
    report(8, "five targets, two agents within the time budget", ok, d.str());
}

} // namespace

int main() {
    double batch_s = 0.0;
    std::vector<SolvedCase> grid = solve_small_grid(batch_s);
    check_1_oracle_equivalence(grid, batch_s);
    check_2_formulations_agree(grid);
    check_3_stationary_reduction();
    check_4_feasibility(grid);
    check_5_gap_formula();
    check_6_socp_unit();
    check_7_bench_determinism();
    check_8_scale_smoke();
    if (g_failures) std::printf("%d of 8 checks failed\n", g_failures);
    else std::printf("all 8 checks passed\n");
    return g_failures == 0 ? 0 : 1;
}
