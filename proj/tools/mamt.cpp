#include "mamt/bench.hpp"
#include "mamt/bnb.hpp"
#include "mamt/formulations.hpp"
#include "mamt/graph.hpp"
#include "mamt/instance.hpp"
#include "mamt/instance_gen.hpp"
#include "mamt/oracle.hpp"
#include "mamt/recovery.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace mamt;
using nlohmann::json;

namespace {

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

Instance load_checked_instance(const std::string &path, int agents_override) {
    Instance inst = load_instance_file(path);
    if (agents_override > 0) inst.n_agents = agents_override;
    const auto findings = validate_instance(inst);
    for (const auto &f : findings)
        std::fprintf(stderr, "%s: [%s] %s\n",
                     f.severity == Severity::Error ? "error" : "warning", f.code.c_str(),
                     f.message.c_str());
    if (has_errors(findings)) throw std::runtime_error(path + " fails validation");
    return inst;
}

void print_tours(const Solution &sol) {
    for (const Tour &tour : sol.tours) {
        if (tour.visits.empty()) {
            std::printf("agent %d: idle\n", tour.agent_id);
            continue;
        }
        std::printf("agent %d (length %.6g):", tour.agent_id, tour.length);
        for (const Visit &v : tour.visits)
            std::printf("  %s @%.4g (%.4g, %.4g)", to_string(v.node).c_str(), v.time,
                        v.position.x, v.position.y);
        std::printf("\n");
    }
}

int cmd_generate(const GenConfig &cfg, const std::string &out_path) {
    Instance inst = generate_instance(cfg);
    const std::string text = save_instance(inst);
    if (out_path.empty() || out_path == "-")
        std::cout << text;
    else
        write_file(out_path, text);
    std::fprintf(stderr, "generated %d targets, %d segments, seed %llu\n",
                 inst.n_targets(), inst.n_segments(),
                 static_cast<unsigned long long>(cfg.seed));
    return 0;
}

struct SolveArgs {
    std::string instance_path;
    std::string formulation = "micp";
    int agents = 0;
    MipOptions opts;
    int threads = 1; // accepted for interface stability; the solver is serial
    std::uint64_t seed = 0;
    bool dump_graph = false;
    bool dump_model = false;
    std::string out_solution;
};

int cmd_solve(const SolveArgs &args) {
    Instance inst = load_checked_instance(args.instance_path, args.agents);
    SegmentGraph graph = build_graph(inst);
    if (args.dump_graph) std::cout << dump_edge_list(graph);

    const FormulationKind kind = parse_formulation(args.formulation);
    ConicModel model = build_formulation(kind, inst, graph);
    if (args.dump_model) std::cout << dump_model(model);

    SolveReport rep = solve_mip(model, args.opts);
    std::printf("formulation:  %s\n", to_string(kind).c_str());
    std::printf("status:       %s\n", to_string(rep.status).c_str());
    std::printf("objective:    %.10g\n", rep.incumbent_objective);
    std::printf("bound:        %.10g\n", rep.best_bound);
    std::printf("gap_percent:  %.4g\n", rep.gap_percent);
    std::printf("nodes:        %ld\n", rep.nodes_explored);
    std::printf("runtime_s:    %.3f\n", rep.runtime_s);

    if (rep.status == MipStatus::Infeasible) return 3;
    if (rep.incumbent_solution.empty()) return 4;

    Solution sol = recover_tours(inst, graph, model, rep.incumbent_solution);
    const auto findings = validate_solution(inst, sol);
    for (const auto &f : findings)
        std::fprintf(stderr, "validation: [%s] %s\n", f.code.c_str(), f.message.c_str());
    std::printf("validation:   %zu findings\n", findings.size());
    print_tours(sol);
    if (!args.out_solution.empty()) save_solution_file(sol, args.out_solution);
    return findings.empty() ? 0 : 5;
}

int cmd_oracle(const std::string &path, int agents) {
    Instance inst = load_checked_instance(path, agents);
    OracleResult res = brute_force_optimum(inst);
    std::printf("objective:    %.10g\n", res.objective);
    for (size_t k = 0; k < res.plan.routes.size(); ++k) {
        std::printf("route %zu: ", k);
        for (int seg : res.plan.routes[k]) std::printf(" v%d", seg);
        std::printf("\n");
    }
    print_tours(res.solution);
    const auto findings = validate_solution(inst, res.solution);
    std::printf("validation:   %zu findings\n", findings.size());
    return findings.empty() ? 0 : 5;
}

int cmd_bench(const std::string &config_path) {
    const json cfg = json::parse(read_file(config_path));

    std::vector<BenchJob> jobs;
    auto add_job = [&](const json &desc) {
        GenConfig gen;
        gen.n_targets = desc.value("n_targets", 5);
        gen.total_window_duration = desc.value("window_duration", 40.0);
        gen.seed = desc.value("seed", std::uint64_t{1});
        gen.arena_side = desc.value("arena_side", gen.arena_side);
        gen.horizon = desc.value("horizon", gen.horizon);
        gen.v_max = desc.value("v_max", gen.v_max);
        std::string id = desc.value("id", "");
        if (id.empty())
            id = "n" + std::to_string(gen.n_targets) + "-d" +
                 std::to_string(static_cast<int>(gen.total_window_duration)) + "-s" +
                 std::to_string(gen.seed);
        jobs.push_back({id, generate_instance(gen), gen.total_window_duration});
    };
    for (const json &desc : cfg.value("instances", json::array())) add_job(desc);
    if (cfg.contains("sweep")) {
        const json &sweep = cfg["sweep"];
        for (int n : sweep.value("n_targets", std::vector<int>{5}))
            for (double d : sweep.value("window_durations", std::vector<double>{40.0}))
                for (std::uint64_t s : sweep.value("seeds", std::vector<std::uint64_t>{1}))
                    add_job(json{{"n_targets", n}, {"window_duration", d}, {"seed", s}});
    }
    if (jobs.empty()) throw std::runtime_error("config lists no instances");

    std::vector<FormulationKind> kinds;
    for (const std::string &name :
         cfg.value("formulations", std::vector<std::string>{"baseline", "micp"}))
        kinds.push_back(parse_formulation(name));
    const auto agent_counts = cfg.value("agent_counts", std::vector<int>{1});

    MipOptions opts;
    opts.time_limit_s = cfg.value("time_limit_s", 300.0);
    opts.rel_gap_tol = cfg.value("gap_tol", opts.rel_gap_tol);
    opts.node_limit = cfg.value("node_limit", opts.node_limit);

    const std::string out_csv = cfg.value("out_csv", "bench.csv");
    std::ofstream csv(out_csv, std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + out_csv);
    std::vector<BenchRow> rows = run_bench(jobs, kinds, agent_counts, opts, &csv, true);
    std::printf("\n%s", summarize(rows).c_str());
    std::printf("wrote %zu rows to %s\n", rows.size(), out_csv.c_str());
    return 0;
}

int cmd_compare(const std::string &path_a, const std::string &path_b) {
    const auto a = read_csv(read_file(path_a));
    const auto b = read_csv(read_file(path_b));
    const std::string diff = compare_rows(a, b);
    if (diff.empty()) {
        std::printf("identical (%zu rows, runtime column ignored)\n", a.size());
        return 0;
    }
    std::printf("%s\n", diff.c_str());
    return 1;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Exact solver stack for multi-agent moving-target routing"};
    app.require_subcommand(1);

    GenConfig gen;
    std::string gen_out;
    auto *generate = app.add_subcommand("generate", "Write a random solvable instance");
    generate->add_option("--n", gen.n_targets, "number of targets")->required();
    generate->add_option("--duration", gen.total_window_duration,
                         "total visibility per target, split over two windows");
    generate->add_option("--seed", gen.seed, "generator seed");
    generate->add_option("--agents", gen.n_agents, "agents recorded in the instance");
    generate->add_option("--arena", gen.arena_side, "side of the square arena");
    generate->add_option("--horizon", gen.horizon, "mission horizon in seconds");
    generate->add_option("--vmax", gen.v_max, "agent top speed");
    generate->add_option("--out", gen_out, "output path ('-' for stdout)");

    SolveArgs sa;
    auto *solve = app.add_subcommand("solve", "Solve an instance to proven optimality");
    solve->add_option("--instance", sa.instance_path, "instance file")->required();
    solve->add_option("--formulation", sa.formulation, "baseline|micp");
    solve->add_option("--agents", sa.agents, "override the instance's agent count");
    solve->add_option("--time-limit", sa.opts.time_limit_s, "seconds before giving up");
    solve->add_option("--gap-tol", sa.opts.rel_gap_tol, "relative optimality gap");
    solve->add_option("--node-limit", sa.opts.node_limit, "search-node budget (-1: none)");
    solve->add_option("--threads", sa.threads, "worker budget (current solver is serial)");
    solve->add_option("--seed", sa.seed, "reserved; the solver is deterministic");
    solve->add_flag("--dump-graph", sa.dump_graph, "print the routing graph edge list");
    solve->add_flag("--dump-model", sa.dump_model, "print the full optimization model");
    solve->add_option("--out-solution", sa.out_solution, "write the recovered tours here");

    std::string oracle_path;
    int oracle_agents = 0;
    auto *oracle = app.add_subcommand("oracle", "Exhaustive optimum for tiny instances");
    oracle->add_option("--instance", oracle_path, "instance file")->required();
    oracle->add_option("--agents", oracle_agents, "override the instance's agent count");

    std::string bench_config;
    auto *bench = app.add_subcommand("bench", "Run a sweep described by a JSON config");
    bench->add_option("--config", bench_config, "sweep description")->required();

    std::string csv_a, csv_b;
    auto *compare = app.add_subcommand("compare", "Diff two result files, ignoring runtime");
    compare->add_option("--csv-a", csv_a, "first result file")->required();
    compare->add_option("--csv-b", csv_b, "second result file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) return cmd_generate(gen, gen_out);
        if (solve->parsed()) return cmd_solve(sa);
        if (oracle->parsed()) return cmd_oracle(oracle_path, oracle_agents);
        if (bench->parsed()) return cmd_bench(bench_config);
        if (compare->parsed()) return cmd_compare(csv_a, csv_b);
    } catch (const std::exception &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
