#include "mamt/conic_model.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace mamt {

VarRef ConicModel::add_var(const std::string &name, double lower, double upper,
                           bool is_binary) {
    // Contradictory bounds are allowed; they surface as an infeasible solve.
    VarDef def;
    def.lower = lower;
    def.upper = upper;
    def.is_binary = is_binary;
    def.name = name;
    vars.push_back(std::move(def));
    return static_cast<VarRef>(vars.size()) - 1;
}

void ConicModel::set_label(const LabelKey &key, VarRef var) {
    labels[key] = var;
}

VarRef ConicModel::var(const LabelKey &key) const {
    auto it = labels.find(key);
    if (it == labels.end()) throw std::out_of_range("no variable with the requested label");
    return it->second;
}

bool ConicModel::has_label(const LabelKey &key) const {
    return labels.count(key) != 0;
}

int ConicModel::n_binary() const {
    int n = 0;
    for (const auto &v : vars) n += v.is_binary ? 1 : 0;
    return n;
}

double eval_terms(const std::vector<LinearTerm> &terms, const std::vector<double> &x) {
    double acc = 0.0;
    for (const auto &t : terms) acc += t.coeff * x.at(static_cast<size_t>(t.var));
    return acc;
}

double eval(const AffineExpr &expr, const std::vector<double> &x) {
    return expr.constant + eval_terms(expr.terms, x);
}

double objective_value(const ConicModel &model, const std::vector<double> &x) {
    return eval_terms(model.objective, x);
}

ConicModel relax(const ConicModel &model) {
    ConicModel out = model;
    for (auto &v : out.vars) v.is_binary = false;
    return out;
}

ConicModel fix_binary(const ConicModel &model, VarRef var, double value) {
    ConicModel out = model;
    auto &def = out.vars.at(static_cast<size_t>(var));
    def.lower = value;
    def.upper = value;
    return out;
}

namespace {

void note_violation(AssignmentCheck &check, double violation, const std::string &where) {
    if (violation > check.max_violation) {
        check.max_violation = violation;
        check.worst = where;
    }
}

} // namespace

AssignmentCheck check_assignment(const ConicModel &model, const std::vector<double> &x,
                                 double tol) {
    if (x.size() != model.vars.size())
        throw std::invalid_argument("assignment length does not match variable count");
    AssignmentCheck check;
    for (size_t i = 0; i < model.vars.size(); ++i) {
        const auto &v = model.vars[i];
        if (std::isfinite(v.lower)) note_violation(check, v.lower - x[i], v.name + " lower bound");
        if (std::isfinite(v.upper)) note_violation(check, x[i] - v.upper, v.name + " upper bound");
        if (v.is_binary)
            note_violation(check, std::fabs(x[i] - std::round(x[i])), v.name + " integrality");
    }
    for (const auto &row : model.rows) {
        const double lhs = eval_terms(row.terms, x);
        if (row.sense == RowSense::Equal)
            note_violation(check, std::fabs(lhs - row.rhs), row.name);
        else if (row.sense == RowSense::LessEqual)
            note_violation(check, lhs - row.rhs, row.name);
        else
            note_violation(check, row.rhs - lhs, row.name);
    }
    for (const auto &soc : model.soc_rows) {
        double sq = 0.0;
        for (const auto &component : soc.vec) {
            const double v = eval(component, x);
            sq += v * v;
        }
        note_violation(check, std::sqrt(sq) - eval(soc.scalar, x), soc.name);
    }
    check.feasible = check.max_violation <= tol;
    return check;
}

namespace {

void print_terms(std::ostream &out, const std::vector<LinearTerm> &terms,
                 const ConicModel &model) {
    if (terms.empty()) {
        out << "0";
        return;
    }
    bool first = true;
    for (const auto &t : terms) {
        if (!first) out << (t.coeff < 0 ? " - " : " + ");
        else if (t.coeff < 0) out << "-";
        first = false;
        const double mag = std::fabs(t.coeff);
        if (mag != 1.0) out << mag << " ";
        out << model.vars.at(static_cast<size_t>(t.var)).name;
    }
}

void print_expr(std::ostream &out, const AffineExpr &expr, const ConicModel &model) {
    print_terms(out, expr.terms, model);
    if (expr.constant > 0) out << " + " << expr.constant;
    if (expr.constant < 0) out << " - " << -expr.constant;
}

} // namespace

std::string dump_model(const ConicModel &model) {
    std::ostringstream out;
    out << std::setprecision(12);
    out << "minimize ";
    print_terms(out, model.objective, model);
    out << "\nsubject to\n";
    for (const auto &row : model.rows) {
        out << "  " << row.name << ": ";
        print_terms(out, row.terms, model);
        const char *rel = row.sense == RowSense::Equal      ? " == "
                          : row.sense == RowSense::LessEqual ? " <= "
                                                             : " >= ";
        out << rel << row.rhs << "\n";
    }
    for (const auto &soc : model.soc_rows) {
        out << "  " << soc.name << ": ||(";
        for (size_t i = 0; i < soc.vec.size(); ++i) {
            if (i) out << ", ";
            print_expr(out, soc.vec[i], model);
        }
        out << ")|| <= ";
        print_expr(out, soc.scalar, model);
        out << "\n";
    }
    out << "bounds\n";
    for (const auto &v : model.vars) {
        out << "  " << v.name << " in [" << v.lower << ", " << v.upper << "]";
        if (v.is_binary) out << " binary";
        out << "\n";
    }
    return out.str();
}

} // namespace mamt
