#pragma once

#include <limits>
#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace mamt {

using VarRef = int;

constexpr double kInf = std::numeric_limits<double>::infinity();

/// What a variable means in the formulation that created it; used to look up
/// solution values without depending on variable ordering.
enum class VarRole {
    FlowY,     // edge selector (binary)
    CostL,     // edge length contribution
    CostLxy,   // edge displacement component (2-d)
    TimeT,     // node visit time (big-M formulation only)
    PosP,      // node position (reserved; positions are substituted, not built)
    ZTimeTail, // edge-activated tail visit time
    ZTimeHead, // edge-activated head visit time
    ZPosTail,  // edge-activated tail position component (2-d)
    ZPosHead,  // edge-activated head position component (2-d)
    Alpha,     // number of depot departures
    LBar,      // slack-shifted edge length (big-M formulation only)
};

struct LabelKey {
    VarRole role = VarRole::FlowY;
    int entity = 0;    // edge or node index, 0 when not applicable
    int agent = -1;    // -1 when the variable is not agent-indexed
    int component = 0; // 0/1 for 2-d quantities

    bool operator<(const LabelKey &o) const {
        return std::tie(role, entity, agent, component) <
               std::tie(o.role, o.entity, o.agent, o.component);
    }
};

struct VarDef {
    double lower = -kInf;
    double upper = kInf;
    bool is_binary = false; // binary vars keep bounds within [0, 1]
    std::string name;
};

struct LinearTerm {
    VarRef var = 0;
    double coeff = 0.0;
};

enum class RowSense { LessEqual, Equal, GreaterEqual };

struct LinearRow {
    std::vector<LinearTerm> terms;
    RowSense sense = RowSense::Equal;
    double rhs = 0.0;
    std::string name;
};

struct AffineExpr {
    std::vector<LinearTerm> terms;
    double constant = 0.0;
};

/// ||vec|| <= scalar, every entry affine in the variables.
struct SocRow {
    std::vector<AffineExpr> vec;
    AffineExpr scalar;
    std::string name;
};

struct AssignmentCheck {
    bool feasible = true;
    double max_violation = 0.0;
    std::string worst; // bound/row name with the largest violation
};

/// Mixed-integer second-order-cone program: minimize objective over linear
/// rows, SOC rows, bounds, and integrality marks.
struct ConicModel {
    std::vector<VarDef> vars;
    std::vector<LinearRow> rows;
    std::vector<SocRow> soc_rows;
    std::vector<LinearTerm> objective; // minimized
    std::map<LabelKey, VarRef> labels;

    VarRef add_var(const std::string &name, double lower, double upper,
                   bool is_binary = false);
    void set_label(const LabelKey &key, VarRef var);
    VarRef var(const LabelKey &key) const; // throws std::out_of_range
    bool has_label(const LabelKey &key) const;

    int n_vars() const { return static_cast<int>(vars.size()); }
    int n_binary() const;
};

double eval(const AffineExpr &expr, const std::vector<double> &x);
double eval_terms(const std::vector<LinearTerm> &terms, const std::vector<double> &x);
double objective_value(const ConicModel &model, const std::vector<double> &x);

/// Copy with every binary mark dropped (bounds kept).
ConicModel relax(const ConicModel &model);

/// Copy with the variable pinned by collapsed bounds lower = upper = value.
ConicModel fix_binary(const ConicModel &model, VarRef var, double value);

/// Verifies bounds, integrality, linear rows, and SOC rows against an
/// absolute tolerance; reports the single worst violation.
AssignmentCheck check_assignment(const ConicModel &model, const std::vector<double> &x,
                                 double tol);

/// Human-readable listing of the full model (objective, rows, cones, bounds).
std::string dump_model(const ConicModel &model);

} // namespace mamt
