#include <doctest.h>

#include "mamt/conic_model.hpp"

#include <stdexcept>

using namespace mamt;

namespace {

/// min x + y s.t. x + y = 1, x - y <= 0.5, ||(x, 2)|| <= y, x binary.
ConicModel small_model() {
    ConicModel m;
    const VarRef x = m.add_var("x", 0.0, 1.0, true);
    const VarRef y = m.add_var("y", 0.0, kInf);
    m.objective = {{x, 1.0}, {y, 1.0}};
    m.rows.push_back({{{x, 1.0}, {y, 1.0}}, RowSense::Equal, 1.0, "sum"});
    m.rows.push_back({{{x, 1.0}, {y, -1.0}}, RowSense::LessEqual, 0.5, "diff"});
    SocRow soc;
    soc.vec = {AffineExpr{{{x, 1.0}}, 0.0}, AffineExpr{{}, 2.0}};
    soc.scalar = AffineExpr{{{y, 1.0}}, 0.0};
    soc.name = "cone";
    m.soc_rows.push_back(soc);
    m.set_label({VarRole::FlowY, 0, -1, 0}, x);
    return m;
}

} // namespace

TEST_CASE("relax clears binary flags and keeps bounds") {
    ConicModel m = small_model();
    CHECK(m.n_binary() == 1);
    const ConicModel r = relax(m);
    CHECK(r.n_binary() == 0);
    CHECK(r.vars[0].lower == 0.0);
    CHECK(r.vars[0].upper == 1.0);
    CHECK(r.rows.size() == m.rows.size());

    // Idempotent.
    const ConicModel rr = relax(r);
    CHECK(rr.n_binary() == 0);
    CHECK(rr.vars.size() == r.vars.size());

    // A binary already fixed to 1 stays fixed.
    const ConicModel f = relax(fix_binary(m, 0, 1.0));
    CHECK(f.vars[0].lower == 1.0);
    CHECK(f.vars[0].upper == 1.0);
}

TEST_CASE("fix_binary collapses bounds; last write wins") {
    const ConicModel m = small_model();
    ConicModel f = fix_binary(m, 0, 1.0);
    CHECK(f.vars[0].lower == 1.0);
    CHECK(f.vars[0].upper == 1.0);
    f = fix_binary(f, 0, 0.0);
    CHECK(f.vars[0].lower == 0.0);
    CHECK(f.vars[0].upper == 0.0);
    CHECK_THROWS_AS(fix_binary(m, 99, 1.0), std::out_of_range);

    // With x pinned to 1, the equality row x + y = 1 evaluated at y = 0.25
    // misses by 0.25.
    const auto check = check_assignment(f, {1.0, 0.25}, 1e-6);
    CHECK(check.max_violation > 0.2);
}

TEST_CASE("check_assignment accepts a feasible point") {
    const ConicModel m = small_model();
    // x = 0, y = 1: sum holds, diff = -1 <= 0.5, ||(0,2)|| = 2 > 1 -> violated
    auto bad = check_assignment(m, {0.0, 1.0}, 1e-6);
    CHECK_FALSE(bad.feasible);
    CHECK(bad.worst == "cone");
    CHECK(bad.max_violation == doctest::Approx(1.0));

    // x = 0, y = 2 violates the equality instead.
    bad = check_assignment(m, {0.0, 2.0}, 1e-6);
    CHECK_FALSE(bad.feasible);
    CHECK(bad.worst == "sum");

    // Fractional binary trips integrality.
    ConicModel binonly;
    binonly.add_var("b", 0.0, 1.0, true);
    bad = check_assignment(binonly, {0.5}, 1e-6);
    CHECK_FALSE(bad.feasible);
    CHECK(bad.max_violation == doctest::Approx(0.5));
    CHECK(bad.worst == "b integrality");

    ConicModel okm = small_model();
    okm.vars[1].upper = kInf;
    const auto ok = check_assignment(okm, {0.0, 1.0}, 1e-6);
    // Still infeasible through the cone; make the cone satisfiable.
    CHECK_FALSE(ok.feasible);

    ConicModel widecone = small_model();
    widecone.soc_rows[0].vec[1].constant = 0.5; // ||(x, 0.5)|| <= y
    const auto good = check_assignment(widecone, {0.0, 1.0}, 1e-6);
    CHECK(good.feasible);
    CHECK(good.max_violation <= 1e-6);
}

TEST_CASE("GreaterEqual rows evaluate with flipped sign") {
    ConicModel m;
    const VarRef x = m.add_var("x", -kInf, kInf);
    m.rows.push_back({{{x, 1.0}}, RowSense::GreaterEqual, 2.0, "lb"});
    CHECK(check_assignment(m, {3.0}, 1e-6).feasible);
    CHECK_FALSE(check_assignment(m, {1.0}, 1e-6).feasible);
}

TEST_CASE("labels resolve variables") {
    const ConicModel m = small_model();
    CHECK(m.var(LabelKey{VarRole::FlowY, 0, -1, 0}) == 0);
    CHECK(m.has_label(LabelKey{VarRole::FlowY, 0, -1, 0}));
    CHECK_FALSE(m.has_label(LabelKey{VarRole::CostL, 0, -1, 0}));
    CHECK_THROWS_AS((void)m.var(LabelKey{VarRole::CostL, 0, -1, 0}), std::out_of_range);
}

TEST_CASE("objective evaluation") {
    const ConicModel m = small_model();
    CHECK(objective_value(m, {0.25, 0.75}) == doctest::Approx(1.0));
}

TEST_CASE("model dump lists rows, cones and bounds") {
    const std::string text = dump_model(small_model());
    CHECK(text.find("minimize") != std::string::npos);
    CHECK(text.find("sum") != std::string::npos);
    CHECK(text.find("cone") != std::string::npos);
    CHECK(text.find("binary") != std::string::npos);
}
