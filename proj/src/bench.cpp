#include "mamt/bench.hpp"

#include "mamt/graph.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

namespace mamt {

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// RFC-4180: quote when the field contains a comma, quote, or newline;
// embedded quotes double up.
std::string quote_csv(const std::string &field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> split_csv_line(const std::string &line, size_t &pos) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    while (pos < line.size()) {
        const char c = line[pos];
        if (quoted) {
            if (c == '"') {
                if (pos + 1 < line.size() && line[pos + 1] == '"') {
                    cur += '"';
                    ++pos;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c == '\n' || c == '\r') {
            break;
        } else {
            cur += c;
        }
        ++pos;
    }
    while (pos < line.size() && (line[pos] == '\n' || line[pos] == '\r')) ++pos;
    fields.push_back(cur);
    return fields;
}

double parse_double(const std::string &s, const char *field) {
    try {
        return std::stod(s);
    } catch (const std::exception &) {
        throw ParseError(std::string("bench csv: bad number in column '") + field +
                         "': " + s);
    }
}

} // namespace

std::string csv_header() {
    return "instance_id,formulation,n_targets,n_agents,window_duration,status,"
           "objective,bound,gap_percent,runtime_s,nodes\n";
}

std::string to_csv_row(const BenchRow &r) {
    std::ostringstream out;
    out << quote_csv(r.instance_id) << ',' << quote_csv(r.formulation) << ','
        << r.n_targets << ',' << r.n_agents << ',' << fmt_double(r.window_duration)
        << ',' << quote_csv(r.status) << ',' << fmt_double(r.objective) << ','
        << fmt_double(r.bound) << ',' << fmt_double(r.gap_percent) << ','
        << fmt_double(r.runtime_s) << ',' << r.nodes << '\n';
    return out.str();
}

std::string write_csv(const std::vector<BenchRow> &rows) {
    std::string out = csv_header();
    for (const auto &r : rows) out += to_csv_row(r);
    return out;
}

std::vector<BenchRow> read_csv(const std::string &text) {
    if (text.empty()) throw ParseError("bench csv: empty input");
    std::vector<BenchRow> rows;
    size_t pos = 0;
    bool first = true;
    while (pos < text.size()) {
        auto fields = split_csv_line(text, pos);
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (first) {
            first = false;
            if (fields.size() != 11 || fields[0] != "instance_id")
                throw ParseError("bench csv: unexpected header");
            continue;
        }
        if (fields.size() != 11)
            throw ParseError("bench csv: expected 11 columns, got " +
                             std::to_string(fields.size()));
        BenchRow r;
        r.instance_id = fields[0];
        r.formulation = fields[1];
        r.n_targets = static_cast<int>(parse_double(fields[2], "n_targets"));
        r.n_agents = static_cast<int>(parse_double(fields[3], "n_agents"));
        r.window_duration = parse_double(fields[4], "window_duration");
        r.status = fields[5];
        r.objective = parse_double(fields[6], "objective");
        r.bound = parse_double(fields[7], "bound");
        r.gap_percent = parse_double(fields[8], "gap_percent");
        r.runtime_s = parse_double(fields[9], "runtime_s");
        r.nodes = static_cast<long>(parse_double(fields[10], "nodes"));
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<BenchRow> run_bench(const std::vector<BenchJob> &jobs,
                                const std::vector<FormulationKind> &formulations,
                                const std::vector<int> &agent_counts,
                                const MipOptions &opts, std::ostream *csv,
                                bool verbose) {
    std::vector<BenchRow> rows;
    if (csv) *csv << csv_header() << std::flush;
    for (const auto &job : jobs) {
        const SegmentGraph graph = build_graph(job.inst);
        for (FormulationKind kind : formulations) {
            for (int agents : agent_counts) {
                BenchRow row;
                row.instance_id = job.instance_id;
                row.formulation = to_string(kind);
                row.n_targets = job.inst.n_targets();
                row.n_agents = agents;
                row.window_duration = job.window_duration;
                try {
                    Instance inst = job.inst;
                    inst.n_agents = agents;
                    ConicModel model = build_formulation(kind, inst, graph);
                    SolveReport rep = solve_mip(model, opts);
                    row.status = to_string(rep.status);
                    row.objective = rep.incumbent_objective;
                    row.bound = rep.best_bound;
                    row.gap_percent = rep.gap_percent;
                    row.runtime_s = rep.runtime_s;
                    row.nodes = rep.nodes_explored;
                } catch (const std::exception &e) {
                    row.status = "error";
                    row.objective = std::numeric_limits<double>::quiet_NaN();
                    row.bound = std::numeric_limits<double>::quiet_NaN();
                    row.gap_percent = std::numeric_limits<double>::quiet_NaN();
                }
                if (verbose)
                    std::printf("%-14s %-8s m=%d: %s obj=%.6g nodes=%ld %.2fs\n",
                                row.instance_id.c_str(), row.formulation.c_str(),
                                row.n_agents, row.status.c_str(), row.objective,
                                row.nodes, row.runtime_s);
                if (csv) *csv << to_csv_row(row) << std::flush;
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

std::string summarize(const std::vector<BenchRow> &rows) {
    struct Acc {
        int count = 0;
        double gap_sum = 0.0;
        double runtime_sum = 0.0;
    };
    std::map<std::tuple<std::string, int, int, double>, Acc> groups;
    for (const auto &r : rows) {
        Acc &acc = groups[{r.formulation, r.n_targets, r.n_agents, r.window_duration}];
        ++acc.count;
        acc.gap_sum += std::isfinite(r.gap_percent) ? r.gap_percent : 100.0;
        acc.runtime_sum += r.runtime_s;
    }
    std::ostringstream out;
    out << "formulation  n  m  duration  cells  mean_gap_pct  mean_runtime_s\n";
    for (const auto &[key, acc] : groups) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%-11s %2d %2d %9.6g %6d %13.6g %15.6g\n",
                      std::get<0>(key).c_str(), std::get<1>(key), std::get<2>(key),
                      std::get<3>(key), acc.count, acc.gap_sum / acc.count,
                      acc.runtime_sum / acc.count);
        out << buf;
    }
    return out.str();
}

std::string compare_rows(const std::vector<BenchRow> &a, const std::vector<BenchRow> &b) {
    if (a.size() != b.size())
        return "row counts differ: " + std::to_string(a.size()) + " vs " +
               std::to_string(b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        const BenchRow &x = a[i];
        const BenchRow &y = b[i];
        const std::string where = "row " + std::to_string(i + 1) + ": ";
        if (x.instance_id != y.instance_id) return where + "instance_id differs";
        if (x.formulation != y.formulation) return where + "formulation differs";
        if (x.n_targets != y.n_targets) return where + "n_targets differs";
        if (x.n_agents != y.n_agents) return where + "n_agents differs";
        if (fmt_double(x.window_duration) != fmt_double(y.window_duration))
            return where + "window_duration differs";
        if (x.status != y.status) return where + "status differs";
        if (fmt_double(x.objective) != fmt_double(y.objective))
            return where + "objective differs: " + fmt_double(x.objective) + " vs " +
                   fmt_double(y.objective);
        if (fmt_double(x.bound) != fmt_double(y.bound)) return where + "bound differs";
        if (fmt_double(x.gap_percent) != fmt_double(y.gap_percent))
            return where + "gap_percent differs";
        if (x.nodes != y.nodes) return where + "nodes differs";
    }
    return "";
}

} // namespace mamt
