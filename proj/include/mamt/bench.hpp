#pragma once

#include "mamt/bnb.hpp"
#include "mamt/formulations.hpp"
#include "mamt/instance.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace mamt {

/// One solver run inside a sweep. Numeric fields serialize at full precision;
/// runtime is wall-clock and therefore excluded from reproducibility checks.
struct BenchRow {
    std::string instance_id;
    std::string formulation;
    int n_targets = 0;
    int n_agents = 0;
    double window_duration = 0.0;
    std::string status;
    double objective = 0.0;
    double bound = 0.0;
    double gap_percent = 0.0;
    double runtime_s = 0.0;
    long nodes = 0;
};

struct BenchJob {
    std::string instance_id;
    Instance inst;
    double window_duration = 0.0; // carried into the rows for grouping
};

/// Cartesian sweep: every job x formulation x agent count, solved with the
/// given options. Rows append to `csv` (with header) as they finish, so a
/// crash loses at most the cell in flight. Per-cell failures become rows with
/// status "error" and never abort the sweep.
std::vector<BenchRow> run_bench(const std::vector<BenchJob> &jobs,
                                const std::vector<FormulationKind> &formulations,
                                const std::vector<int> &agent_counts,
                                const MipOptions &opts, std::ostream *csv = nullptr,
                                bool verbose = false);

/// CSV with a header row, fields RFC-4180-quoted, numbers at %.17g.
std::string csv_header();
std::string to_csv_row(const BenchRow &row);
std::string write_csv(const std::vector<BenchRow> &rows);
std::vector<BenchRow> read_csv(const std::string &text); // throws ParseError

/// Mean gap and runtime per (formulation, n_targets, n_agents, duration)
/// group, as a fixed-width text table.
std::string summarize(const std::vector<BenchRow> &rows);

/// Field-by-field comparison of two row sets, ignoring runtime. Returns an
/// empty string when equal, otherwise a description of the first difference.
std::string compare_rows(const std::vector<BenchRow> &a, const std::vector<BenchRow> &b);

} // namespace mamt
