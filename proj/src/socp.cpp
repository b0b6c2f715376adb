#include "mamt/socp.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <stdexcept>

namespace mamt {

std::string to_string(RelaxStatus status) {
    switch (status) {
    case RelaxStatus::Optimal: return "Optimal";
    case RelaxStatus::Infeasible: return "Infeasible";
    case RelaxStatus::Unbounded: return "Unbounded";
    case RelaxStatus::NumericalFailure: return "NumericalFailure";
    }
    return "?";
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// min c'x  s.t.  A x = b,  G x + s = h,  s in (R+^n_lp x SOC(q1) x ...).
struct StandardForm {
    int n = 0, p = 0, m = 0, n_lp = 0;
    std::vector<int> soc_dims;
    SpMat A, G;
    Eigen::VectorXd c, b, h;
};

/// Fixed variables (lower == upper) become equality rows so the inequality
/// cone keeps a nonempty interior; all other finite bounds become LP rows.
StandardForm to_standard_form(const ConicModel &model) {
    const int n = model.n_vars();
    if (n == 0) throw std::invalid_argument("model has no variables");

    StandardForm sf;
    sf.n = n;
    sf.c = Eigen::VectorXd::Zero(n);
    for (const auto &t : model.objective) sf.c(t.var) += t.coeff;

    std::vector<Triplet> a_trip, g_trip;
    std::vector<double> b_vals, h_vals;

    for (const auto &row : model.rows) {
        if (row.sense == RowSense::Equal) {
            for (const auto &t : row.terms) a_trip.emplace_back((int)b_vals.size(), t.var, t.coeff);
            b_vals.push_back(row.rhs);
        }
    }
    for (int i = 0; i < n; ++i) {
        const auto &v = model.vars[(size_t)i];
        if (v.lower == v.upper) {
            a_trip.emplace_back((int)b_vals.size(), i, 1.0);
            b_vals.push_back(v.lower);
        }
    }

    for (const auto &row : model.rows) {
        if (row.sense == RowSense::Equal) continue;
        const double sign = row.sense == RowSense::LessEqual ? 1.0 : -1.0;
        for (const auto &t : row.terms)
            g_trip.emplace_back((int)h_vals.size(), t.var, sign * t.coeff);
        h_vals.push_back(sign * row.rhs);
    }
    for (int i = 0; i < n; ++i) {
        const auto &v = model.vars[(size_t)i];
        if (v.lower == v.upper) continue;
        if (std::isfinite(v.lower)) {
            g_trip.emplace_back((int)h_vals.size(), i, -1.0);
            h_vals.push_back(-v.lower);
        }
        if (std::isfinite(v.upper)) {
            g_trip.emplace_back((int)h_vals.size(), i, 1.0);
            h_vals.push_back(v.upper);
        }
    }
    sf.n_lp = (int)h_vals.size();

    for (const auto &soc : model.soc_rows) {
        const int dim = 1 + (int)soc.vec.size();
        // s_block = (scalar, vec) must land in the cone: G rows are the
        // negated affine terms, h the constants.
        int r = (int)h_vals.size();
        for (const auto &t : soc.scalar.terms) g_trip.emplace_back(r, t.var, -t.coeff);
        h_vals.push_back(soc.scalar.constant);
        for (const auto &component : soc.vec) {
            r = (int)h_vals.size();
            for (const auto &t : component.terms) g_trip.emplace_back(r, t.var, -t.coeff);
            h_vals.push_back(component.constant);
        }
        sf.soc_dims.push_back(dim);
    }

    sf.p = (int)b_vals.size();
    sf.m = (int)h_vals.size();
    if (sf.m == 0) throw std::invalid_argument("model has no conic part");

    sf.A.resize(sf.p, n);
    sf.A.setFromTriplets(a_trip.begin(), a_trip.end());
    sf.A.makeCompressed();
    sf.G.resize(sf.m, n);
    sf.G.setFromTriplets(g_trip.begin(), g_trip.end());
    sf.G.makeCompressed();
    sf.b = Eigen::Map<Eigen::VectorXd>(b_vals.data(), sf.p);
    sf.h = Eigen::Map<Eigen::VectorXd>(h_vals.data(), sf.m);
    return sf;
}

enum class ExitCode {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    CloseToOptimal,
    CloseToPrimalInfeasible,
    CloseToDualInfeasible,
    MaxIterations,
    Numerics,
    Fatal,
    NotConvergedYet,
};

struct Settings {
    double feastol = 1e-7;
    double abstol = 1e-8;
    double reltol = 1e-8;
    double feastol_inacc = 1e-4;
    double abstol_inacc = 5e-5;
    double reltol_inacc = 5e-5;
    double gamma = 0.99;
    double stepmin = 1e-6;
    double stepmax = 0.999;
    double sigmamin = 1e-4;
    double sigmamax = 1.0;
    double deltastat = 7e-8;
    double linsysacc = 1e-14;
    double irerrfact = 30.0;
    double safeguard = 500.0;
    int nitref = 9;
    int iter_max = 200;
    int equil_iters = 3;
    bool verbose = false;
};

/// Nesterov-Todd scaling of one second-order cone, stored densely:
/// W^2 = eta^2 * [[a^2 + w, cc*q'], [cc*q, I + dd*q*q']].
struct SocScaling {
    int dim = 0;
    double eta = 0.0, eta_sq = 0.0;
    double a = 0.0, w = 0.0, cc = 0.0, dd = 0.0;
    Eigen::VectorXd q, skbar, zkbar;
};

struct Info {
    double pcost = 0, dcost = 0, gap = 0, mu = 0;
    double pres = 0, dres = 0, kapovert = 0;
    std::optional<double> relgap, pinfres, dinfres;
    double step = 0, sigma = 0;
    int iter = 0;

    bool isBetterThan(const Info &other) const {
        if (pinfres.has_value() && kapovert > 1.0)
            return gap > 0 && other.gap > 0 && gap < other.gap &&
                   *pinfres > 0 && *pinfres < other.pres &&
                   mu > 0 && mu < other.mu;
        return gap > 0 && other.gap > 0 && gap < other.gap &&
               pres > 0 && pres < other.pres &&
               dres > 0 && dres < other.dres &&
               kapovert > 0 && kapovert < other.kapovert &&
               mu > 0 && mu < other.mu;
    }
};

struct Iterate {
    Eigen::VectorXd x, y, z, s, lambda;
    double kap = 1.0, tau = 1.0;
    double cx = 0, by = 0, hz = 0;
    Info i;
};

class IpSolver {
  public:
    IpSolver(StandardForm sf, const Settings &settings)
        : sf_(std::move(sf)), st_(settings) {
        n_ = sf_.n;
        p_ = sf_.p;
        m_ = sf_.m;
        dim_K_ = n_ + p_ + m_;
        socs_.resize(sf_.soc_dims.size());
        for (size_t k = 0; k < socs_.size(); ++k) socs_[k].dim = sf_.soc_dims[k];
        equilibrate();
        At_ = sf_.A.transpose();
        Gt_ = sf_.G.transpose();
        lp_v_.resize(sf_.n_lp);
        lp_w_.resize(sf_.n_lp);
        w_.x.resize(n_);
        w_.y.resize(p_);
        w_.z.resize(m_);
        w_.s.resize(m_);
        w_.lambda.resize(m_);
    }

    ExitCode solve();

    const Iterate &iterate() const { return w_; }

  private:
    void equilibrate();
    void backscale();
    void buildKKT(bool identity_scaling);
    int solveKKT(const Eigen::VectorXd &rhs, Eigen::VectorXd &dx, Eigen::VectorXd &dy,
                 Eigen::VectorXd &dz, bool initialize);
    bool updateScalings(const Eigen::VectorXd &s, const Eigen::VectorXd &z,
                        Eigen::VectorXd &lambda);
    void scale(const Eigen::VectorXd &z, Eigen::VectorXd &lambda) const;
    void scale2add(const Eigen::VectorXd &x, Eigen::VectorXd &y) const;
    double conicProduct(const Eigen::VectorXd &u, const Eigen::VectorXd &v,
                        Eigen::VectorXd &out) const;
    void conicDivision(const Eigen::VectorXd &u, const Eigen::VectorXd &w,
                       Eigen::VectorXd &v) const;
    void bringToCone(const Eigen::VectorXd &r, Eigen::VectorXd &s) const;
    double lineSearch(const Eigen::VectorXd &lambda, const Eigen::VectorXd &ds,
                      const Eigen::VectorXd &dz, double tau, double dtau, double kap,
                      double dkap) const;
    void computeResiduals();
    void updateStatistics();
    ExitCode checkExitConditions(bool reduced_accuracy) const;
    void rhsAffine();
    void rhsCombined();

    StandardForm sf_;
    Settings st_;
    int n_ = 0, p_ = 0, m_ = 0, dim_K_ = 0;

    std::vector<SocScaling> socs_;
    Eigen::VectorXd lp_v_, lp_w_; // LP-cone scaling: v = s/z, w = sqrt(v)

    Eigen::VectorXd x_equil_, a_equil_, g_equil_;
    SpMat At_, Gt_, K_;
    Eigen::SimplicialLDLT<SpMat, Eigen::Upper> ldlt_;
    bool pattern_analyzed_ = false;

    Iterate w_, w_best_;

    Eigen::VectorXd rhs1_, rhs2_;
    Eigen::VectorXd rx_, ry_, rz_;
    double hresx_ = 0, hresy_ = 0, hresz_ = 0, rt_ = 0;
    double resx0_ = 1, resy0_ = 1, resz0_ = 1;
    double nx_ = 0, ny_ = 0, nz_ = 0, ns_ = 0;

    Eigen::VectorXd W_times_dzaff_, dsaff_by_W_, dsaff_;
};

void maxRows(Eigen::VectorXd &e, const SpMat &m) {
    for (int j = 0; j < m.outerSize(); ++j)
        for (SpMat::InnerIterator it(m, j); it; ++it)
            e(it.row()) = std::max(std::fabs(it.value()), e(it.row()));
}

void maxCols(Eigen::VectorXd &e, const SpMat &m) {
    for (int j = 0; j < m.outerSize(); ++j)
        for (SpMat::InnerIterator it(m, j); it; ++it)
            e(j) = std::max(std::fabs(it.value()), e(j));
}

void equilibrateRows(const Eigen::VectorXd &e, SpMat &m) {
    for (int j = 0; j < m.outerSize(); ++j)
        for (SpMat::InnerIterator it(m, j); it; ++it) it.valueRef() /= e(it.row());
}

void equilibrateCols(const Eigen::VectorXd &e, SpMat &m) {
    for (int j = 0; j < m.outerSize(); ++j)
        for (SpMat::InnerIterator it(m, j); it; ++it) it.valueRef() /= e(j);
}

/// Ruiz-style scaling; SOC rows share one factor so the cone is preserved.
void IpSolver::equilibrate() {
    x_equil_ = Eigen::VectorXd::Ones(n_);
    a_equil_ = Eigen::VectorXd::Ones(p_);
    g_equil_ = Eigen::VectorXd::Ones(m_);

    Eigen::VectorXd x_tmp(n_), a_tmp(p_), g_tmp(m_);
    const auto sqrt_op = [](double v) { return std::fabs(v) < 1e-6 ? 1.0 : std::sqrt(v); };

    for (int iter = 0; iter < st_.equil_iters; ++iter) {
        x_tmp.setZero();
        a_tmp.setZero();
        g_tmp.setZero();

        maxCols(x_tmp, sf_.A);
        maxCols(x_tmp, sf_.G);
        maxRows(a_tmp, sf_.A);
        maxRows(g_tmp, sf_.G);

        int ind = sf_.n_lp;
        for (const int dim : sf_.soc_dims) {
            const double total = g_tmp.segment(ind, dim).sum();
            g_tmp.segment(ind, dim).setConstant(total);
            ind += dim;
        }

        x_tmp = x_tmp.unaryExpr(sqrt_op);
        a_tmp = a_tmp.unaryExpr(sqrt_op);
        g_tmp = g_tmp.unaryExpr(sqrt_op);

        equilibrateRows(a_tmp, sf_.A);
        equilibrateRows(g_tmp, sf_.G);
        equilibrateCols(x_tmp, sf_.A);
        equilibrateCols(x_tmp, sf_.G);

        x_equil_ = x_equil_.cwiseProduct(x_tmp);
        a_equil_ = a_equil_.cwiseProduct(a_tmp);
        g_equil_ = g_equil_.cwiseProduct(g_tmp);
    }

    sf_.c = sf_.c.cwiseQuotient(x_equil_);
    sf_.b = sf_.b.cwiseQuotient(a_equil_);
    sf_.h = sf_.h.cwiseQuotient(g_equil_);
}

void IpSolver::backscale() {
    w_.x = w_.x.cwiseQuotient(x_equil_ * w_.tau);
    w_.y = w_.y.cwiseQuotient(a_equil_ * w_.tau);
    w_.z = w_.z.cwiseQuotient(g_equil_ * w_.tau);
    w_.s = w_.s.cwiseProduct(g_equil_ / w_.tau);
}

/// Upper triangle of the quasidefinite KKT matrix
///   [ dI   A'        G'      ]
///   [ A   -dI        0       ]
///   [ G    0   -(W^2 + dI)   ]
/// with W = I for the initialization solves. The triplet pattern is identical
/// either way so one symbolic analysis serves every factorization.
void IpSolver::buildKKT(bool identity_scaling) {
    std::vector<Triplet> trip;
    trip.reserve((size_t)(n_ + p_ + At_.nonZeros() + Gt_.nonZeros() + sf_.n_lp) +
                 6 * socs_.size());

    for (int k = 0; k < n_; ++k) trip.emplace_back(k, k, st_.deltastat);
    for (int k = 0; k < p_; ++k) trip.emplace_back(n_ + k, n_ + k, -st_.deltastat);

    for (int col = 0; col < At_.outerSize(); ++col)
        for (SpMat::InnerIterator it(At_, col); it; ++it)
            trip.emplace_back((int)it.row(), n_ + col, it.value());
    for (int col = 0; col < Gt_.outerSize(); ++col)
        for (SpMat::InnerIterator it(Gt_, col); it; ++it)
            trip.emplace_back((int)it.row(), n_ + p_ + col, it.value());

    const int off = n_ + p_;
    for (int k = 0; k < sf_.n_lp; ++k) {
        const double v = identity_scaling ? 1.0 : lp_v_(k);
        trip.emplace_back(off + k, off + k, -v - st_.deltastat);
    }
    int cone_start = sf_.n_lp;
    for (const SocScaling &sc : socs_) {
        // Dense W^2 block (all SOCs here are tiny, so no sparse expansion).
        Eigen::MatrixXd w2 = Eigen::MatrixXd::Identity(sc.dim, sc.dim);
        if (!identity_scaling) {
            w2(0, 0) = sc.a * sc.a + sc.w;
            w2.block(0, 1, 1, sc.dim - 1) = sc.cc * sc.q.transpose();
            w2.block(1, 1, sc.dim - 1, sc.dim - 1) +=
                sc.dd * sc.q * sc.q.transpose();
            w2 *= sc.eta_sq;
        }
        for (int r = 0; r < sc.dim; ++r)
            for (int cidx = r; cidx < sc.dim; ++cidx) {
                const double extra = (r == cidx) ? st_.deltastat : 0.0;
                trip.emplace_back(off + cone_start + r, off + cone_start + cidx,
                                  -w2(r, cidx) - extra);
            }
        cone_start += sc.dim;
    }

    K_.resize(dim_K_, dim_K_);
    K_.setFromTriplets(trip.begin(), trip.end());
    K_.makeCompressed();
}

bool IpSolver::updateScalings(const Eigen::VectorXd &s, const Eigen::VectorXd &z,
                              Eigen::VectorXd &lambda) {
    lp_v_ = s.head(sf_.n_lp).cwiseQuotient(z.head(sf_.n_lp));
    lp_w_ = lp_v_.cwiseSqrt();

    int cone_start = sf_.n_lp;
    for (SocScaling &sc : socs_) {
        const double sres =
            s(cone_start) * s(cone_start) - s.segment(cone_start + 1, sc.dim - 1).squaredNorm();
        const double zres =
            z(cone_start) * z(cone_start) - z.segment(cone_start + 1, sc.dim - 1).squaredNorm();
        if (sres <= 0 || zres <= 0) return false;

        const double snorm = std::sqrt(sres);
        const double znorm = std::sqrt(zres);
        sc.skbar = s.segment(cone_start, sc.dim) / snorm;
        sc.zkbar = z.segment(cone_start, sc.dim) / znorm;
        sc.eta_sq = snorm / znorm;
        sc.eta = std::sqrt(sc.eta_sq);

        double gamma = 1.0 + sc.skbar.dot(sc.zkbar);
        gamma = std::sqrt(0.5 * gamma);
        sc.a = (0.5 / gamma) * (sc.skbar(0) + sc.zkbar(0));
        sc.q = (0.5 / gamma) * (sc.skbar.tail(sc.dim - 1) - sc.zkbar.tail(sc.dim - 1));
        sc.w = sc.q.squaredNorm();
        sc.cc = (1.0 + sc.a) + sc.w / (1.0 + sc.a);
        sc.dd = 1.0 + 2.0 / (1.0 + sc.a) + sc.w / std::pow(1.0 + sc.a, 2);

        cone_start += sc.dim;
    }
    scale(z, lambda);
    return true;
}

void IpSolver::scale(const Eigen::VectorXd &z, Eigen::VectorXd &lambda) const {
    lambda.head(sf_.n_lp) = lp_w_.cwiseProduct(z.head(sf_.n_lp));
    int cone_start = sf_.n_lp;
    for (const SocScaling &sc : socs_) {
        const double zeta = sc.q.dot(z.segment(cone_start + 1, sc.dim - 1));
        const double factor = z(cone_start) + zeta / (1.0 + sc.a);
        lambda(cone_start) = sc.eta * (sc.a * z(cone_start) + zeta);
        lambda.segment(cone_start + 1, sc.dim - 1) =
            sc.eta * (z.segment(cone_start + 1, sc.dim - 1) + factor * sc.q);
        cone_start += sc.dim;
    }
}

void IpSolver::scale2add(const Eigen::VectorXd &x, Eigen::VectorXd &y) const {
    y.head(sf_.n_lp) += lp_v_.cwiseProduct(x.head(sf_.n_lp));
    int cone_start = sf_.n_lp;
    for (const SocScaling &sc : socs_) {
        const auto x1 = x.segment(cone_start + 1, sc.dim - 1);
        const double qtx1 = sc.q.dot(x1);
        y(cone_start) += sc.eta_sq * ((sc.a * sc.a + sc.w) * x(cone_start) + sc.cc * qtx1);
        y.segment(cone_start + 1, sc.dim - 1) +=
            sc.eta_sq * (sc.cc * x(cone_start) * sc.q + x1 + sc.dd * qtx1 * sc.q);
        cone_start += sc.dim;
    }
}

double IpSolver::conicProduct(const Eigen::VectorXd &u, const Eigen::VectorXd &v,
                              Eigen::VectorXd &out) const {
    out.head(sf_.n_lp) = u.head(sf_.n_lp).cwiseProduct(v.head(sf_.n_lp));
    double mu = out.head(sf_.n_lp).lpNorm<1>();
    int cone_start = sf_.n_lp;
    for (const SocScaling &sc : socs_) {
        const double u0 = u(cone_start);
        const double v0 = v(cone_start);
        out(cone_start) = u.segment(cone_start, sc.dim).dot(v.segment(cone_start, sc.dim));
        mu += std::fabs(out(cone_start));
        out.segment(cone_start + 1, sc.dim - 1) =
            u0 * v.segment(cone_start + 1, sc.dim - 1) +
            v0 * u.segment(cone_start + 1, sc.dim - 1);
        cone_start += sc.dim;
    }
    return mu;
}

void IpSolver::conicDivision(const Eigen::VectorXd &u, const Eigen::VectorXd &w,
                             Eigen::VectorXd &v) const {
    v.head(sf_.n_lp) = w.head(sf_.n_lp).cwiseQuotient(u.head(sf_.n_lp));
    int cone_start = sf_.n_lp;
    for (const SocScaling &sc : socs_) {
        const double u0 = u(cone_start);
        const double w0 = w(cone_start);
        const double rho = u0 * u0 - u.segment(cone_start + 1, sc.dim - 1).squaredNorm();
        const double zeta = u.segment(cone_start + 1, sc.dim - 1)
                                .dot(w.segment(cone_start + 1, sc.dim - 1));
        const double factor = (zeta / u0 - w0) / rho;
        v(cone_start) = (u0 * w0 - zeta) / rho;
        v.segment(cone_start + 1, sc.dim - 1) =
            factor * u.segment(cone_start + 1, sc.dim - 1) +
            w.segment(cone_start + 1, sc.dim - 1) / u0;
        cone_start += sc.dim;
    }
}

void IpSolver::bringToCone(const Eigen::VectorXd &r, Eigen::VectorXd &s) const {
    double alpha = -st_.gamma;
    for (int i = 0; i < sf_.n_lp; ++i)
        if (r(i) <= 0 && -r(i) > alpha) alpha = -r(i);
    int cone_start = sf_.n_lp;
    for (const SocScaling &sc : socs_) {
        const double cres = r(cone_start) - r.segment(cone_start + 1, sc.dim - 1).norm();
        cone_start += sc.dim;
        if (cres <= 0 && -cres > alpha) alpha = -cres;
    }

    alpha += 1.0;
    s = r;
    s.head(sf_.n_lp).array() += alpha;
    cone_start = sf_.n_lp;
    for (const SocScaling &sc : socs_) {
        s(cone_start) += alpha;
        cone_start += sc.dim;
    }
}

double IpSolver::lineSearch(const Eigen::VectorXd &lambda, const Eigen::VectorXd &ds,
                            const Eigen::VectorXd &dz, double tau, double dtau, double kap,
                            double dkap) const {
    double alpha;
    if (sf_.n_lp > 0) {
        const double rhomin = ds.head(sf_.n_lp).cwiseQuotient(lambda.head(sf_.n_lp)).minCoeff();
        const double sigmamin = dz.head(sf_.n_lp).cwiseQuotient(lambda.head(sf_.n_lp)).minCoeff();
        const double eps = 1e-13;
        if (-sigmamin > -rhomin)
            alpha = sigmamin < 0.0 ? 1.0 / (-sigmamin) : 1.0 / eps;
        else
            alpha = rhomin < 0.0 ? 1.0 / (-rhomin) : 1.0 / eps;
    } else {
        alpha = 10.0;
    }

    const double minus_tau_by_dtau = -tau / dtau;
    const double minus_kap_by_dkap = -kap / dkap;
    if (minus_tau_by_dtau > 0.0 && minus_tau_by_dtau < alpha) alpha = minus_tau_by_dtau;
    if (minus_kap_by_dkap > 0.0 && minus_kap_by_dkap < alpha) alpha = minus_kap_by_dkap;

    int cone_start = sf_.n_lp;
    for (const SocScaling &sc : socs_) {
        const double lknorm2 = std::pow(lambda(cone_start), 2) -
                               lambda.segment(cone_start + 1, sc.dim - 1).squaredNorm();
        if (lknorm2 <= 0.0) {
            cone_start += sc.dim;
            continue;
        }
        const double lknorm = std::sqrt(lknorm2);
        const Eigen::VectorXd lkbar = lambda.segment(cone_start, sc.dim) / lknorm;
        const double lknorminv = 1.0 / lknorm;

        const double lkbar_times_dsk =
            lkbar(0) * ds(cone_start) -
            lkbar.segment(1, sc.dim - 1).dot(ds.segment(cone_start + 1, sc.dim - 1));
        const double lkbar_times_dzk =
            lkbar(0) * dz(cone_start) -
            lkbar.segment(1, sc.dim - 1).dot(dz.segment(cone_start + 1, sc.dim - 1));

        Eigen::VectorXd rho(sc.dim);
        rho(0) = lknorminv * lkbar_times_dsk;
        double factor = (lkbar_times_dsk + ds(cone_start)) / (lkbar(0) + 1.0);
        rho.tail(sc.dim - 1) = lknorminv * (ds.segment(cone_start + 1, sc.dim - 1) -
                                            factor * lkbar.segment(1, sc.dim - 1));
        const double rhonorm = rho.tail(sc.dim - 1).norm() - rho(0);

        Eigen::VectorXd sigma(sc.dim);
        sigma(0) = lknorminv * lkbar_times_dzk;
        factor = (lkbar_times_dzk + dz(cone_start)) / (lkbar(0) + 1.0);
        sigma.tail(sc.dim - 1) = lknorminv * (dz.segment(cone_start + 1, sc.dim - 1) -
                                              factor * lkbar.segment(1, sc.dim - 1));
        const double sigmanorm = sigma.tail(sc.dim - 1).norm() - sigma(0);

        const double conic_step = std::max({0.0, sigmanorm, rhonorm});
        if (conic_step != 0.0) alpha = std::min(1.0 / conic_step, alpha);

        cone_start += sc.dim;
    }

    return std::clamp(alpha, st_.stepmin, st_.stepmax);
}

int IpSolver::solveKKT(const Eigen::VectorXd &rhs, Eigen::VectorXd &dx, Eigen::VectorXd &dy,
                       Eigen::VectorXd &dz, bool initialize) {
    Eigen::VectorXd x = ldlt_.solve(rhs);

    const double error_threshold = (1.0 + rhs.lpNorm<Eigen::Infinity>()) * st_.linsysacc;
    double nerr_prev = std::numeric_limits<double>::max();
    Eigen::VectorXd dx_ref(dim_K_);

    const auto bx = rhs.head(n_);
    const auto by = rhs.segment(n_, p_);
    const auto bz = rhs.tail(m_);

    // Iterative refinement against the regularized KKT system.
    int k_ref;
    for (k_ref = 0; k_ref <= st_.nitref; ++k_ref) {
        const auto dx_cur = x.head(n_);
        const auto dy_cur = x.segment(n_, p_);
        const auto dz_cur = x.tail(m_);

        Eigen::VectorXd ex = bx - Gt_ * dz_cur;
        if (p_ > 0) ex -= At_ * dy_cur;
        ex -= st_.deltastat * dx_cur;
        const double nex = ex.lpNorm<Eigen::Infinity>();

        Eigen::VectorXd ey = by;
        if (p_ > 0) ey -= sf_.A * dx_cur;
        ey += st_.deltastat * dy_cur;
        const double ney = p_ > 0 ? ey.lpNorm<Eigen::Infinity>() : 0.0;

        Eigen::VectorXd ez = bz - sf_.G * dx_cur;
        ez += st_.deltastat * dz_cur;
        if (initialize)
            ez += dz_cur;
        else
            scale2add(dz_cur, ez);
        const double nez = ez.lpNorm<Eigen::Infinity>();

        double nerr = std::max(nex, nez);
        if (p_ > 0) nerr = std::max(nerr, ney);

        if (k_ref > 0 && nerr > nerr_prev) {
            x -= dx_ref;
            --k_ref;
            break;
        }
        if (k_ref == st_.nitref || nerr < error_threshold ||
            (k_ref > 0 && nerr_prev < st_.irerrfact * nerr))
            break;
        nerr_prev = nerr;

        Eigen::VectorXd e(dim_K_);
        e << ex, ey, ez;
        dx_ref = ldlt_.solve(e);
        x += dx_ref;
    }

    dx = x.head(n_);
    dy = x.segment(n_, p_);
    dz = x.tail(m_);
    return k_ref;
}

void IpSolver::computeResiduals() {
    rx_ = -(Gt_ * w_.z);
    if (p_ > 0) rx_ -= At_ * w_.y;
    hresx_ = rx_.norm();
    rx_ -= w_.tau * sf_.c;

    if (p_ > 0) {
        ry_ = sf_.A * w_.x;
        hresy_ = ry_.norm();
        ry_ -= w_.tau * sf_.b;
    } else {
        ry_.resize(0);
        hresy_ = 0.0;
    }

    rz_ = w_.s + sf_.G * w_.x;
    hresz_ = rz_.norm();
    rz_ -= w_.tau * sf_.h;

    w_.cx = sf_.c.dot(w_.x);
    w_.by = p_ > 0 ? sf_.b.dot(w_.y) : 0.0;
    w_.hz = sf_.h.dot(w_.z);
    rt_ = w_.kap + w_.cx + w_.by + w_.hz;

    nx_ = w_.x.norm();
    ny_ = w_.y.norm();
    nz_ = w_.z.norm();
    ns_ = w_.s.norm();
}

void IpSolver::updateStatistics() {
    Info &i = w_.i;
    i.gap = w_.s.dot(w_.z);
    i.mu = (i.gap + w_.kap * w_.tau) / double(sf_.n_lp + (int)socs_.size() + 1);
    i.kapovert = w_.kap / w_.tau;
    i.pcost = w_.cx / w_.tau;
    i.dcost = -(w_.hz + w_.by) / w_.tau;

    if (i.pcost < 0.0)
        i.relgap = i.gap / (-i.pcost);
    else if (i.dcost > 0.0)
        i.relgap = i.gap / i.dcost;
    else
        i.relgap = std::nullopt;

    const double nry = p_ > 0 ? ry_.norm() / std::max(resy0_ + nx_, 1.0) : 0.0;
    const double nrz = rz_.norm() / std::max(resz0_ + nx_ + ns_, 1.0);
    i.pres = std::max(nry, nrz) / w_.tau;
    i.dres = rx_.norm() / std::max(resx0_ + ny_ + nz_, 1.0) / w_.tau;

    i.pinfres.reset();
    i.dinfres.reset();
    if ((w_.hz + w_.by) / std::max(ny_ + nz_, 1.0) < -st_.reltol)
        i.pinfres = hresx_ / std::max(ny_ + nz_, 1.0);
    if (w_.cx / std::max(nx_, 1.0) < -st_.reltol)
        i.dinfres = std::max(hresy_ / std::max(nx_, 1.0), hresz_ / std::max(nx_ + ns_, 1.0));

    if (st_.verbose) {
        if (i.iter == 0)
            std::printf("it    pcost        dcost       gap     pres    dres    k/t     mu\n");
        std::printf("%2d  %+.4e  %+.4e  %+.1e  %.1e  %.1e  %.1e  %.1e\n", i.iter, i.pcost,
                     i.dcost, i.gap, i.pres, i.dres, i.kapovert, i.mu);
    }
}

ExitCode IpSolver::checkExitConditions(bool reduced_accuracy) const {
    const double feastol = reduced_accuracy ? st_.feastol_inacc : st_.feastol;
    const double abstol = reduced_accuracy ? st_.abstol_inacc : st_.abstol;
    const double reltol = reduced_accuracy ? st_.reltol_inacc : st_.reltol;
    const Info &i = w_.i;

    if ((-w_.cx > 0.0 || -w_.by - w_.hz >= -abstol) && (i.pres < feastol && i.dres < feastol) &&
        (i.gap < abstol || (i.relgap.has_value() && *i.relgap < reltol)))
        return reduced_accuracy ? ExitCode::CloseToOptimal : ExitCode::Optimal;

    if (i.dinfres.has_value() && *i.dinfres < feastol && w_.tau < w_.kap)
        return reduced_accuracy ? ExitCode::CloseToDualInfeasible : ExitCode::DualInfeasible;

    if ((i.pinfres.has_value() && *i.pinfres < feastol && w_.tau < w_.kap) ||
        (w_.tau < feastol && w_.kap < feastol && i.pinfres.has_value() && *i.pinfres < feastol))
        return reduced_accuracy ? ExitCode::CloseToPrimalInfeasible : ExitCode::PrimalInfeasible;

    return ExitCode::NotConvergedYet;
}

void IpSolver::rhsAffine() {
    rhs2_.head(n_) = rx_;
    rhs2_.segment(n_, p_) = -ry_;
    rhs2_.tail(m_) = w_.s - rz_;
}

void IpSolver::rhsCombined() {
    Eigen::VectorXd ds1(m_), ds2(m_);

    // ds = lambda o lambda + (W \ dsaff) o (W dzaff) - sigma*mu*e
    conicProduct(w_.lambda, w_.lambda, ds1);
    conicProduct(dsaff_by_W_, W_times_dzaff_, ds2);

    const double sigmamu = w_.i.sigma * w_.i.mu;
    ds1.head(sf_.n_lp) += ds2.head(sf_.n_lp);
    ds1.head(sf_.n_lp).array() -= sigmamu;
    int k = sf_.n_lp;
    for (const SocScaling &sc : socs_) {
        ds1(k) -= sigmamu;
        ds1.segment(k, sc.dim) += ds2.segment(k, sc.dim);
        k += sc.dim;
    }

    // dz = -(1 - sigma) * rz + W * (lambda \ ds)
    conicDivision(w_.lambda, ds1, dsaff_by_W_);
    scale(dsaff_by_W_, ds1);

    const double one_minus_sigma = 1.0 - w_.i.sigma;
    rhs2_.head(n_ + p_) *= one_minus_sigma;
    rhs2_.tail(m_) = -one_minus_sigma * rz_ + ds1;
}

ExitCode IpSolver::solve() {
    buildKKT(true);
    ldlt_.analyzePattern(K_);
    pattern_analyzed_ = true;
    ldlt_.factorize(K_);
    if (ldlt_.info() != Eigen::Success) return ExitCode::Fatal;

    rhs1_.resize(dim_K_);
    rhs1_.setZero();
    rhs1_.segment(n_, p_) = sf_.b;
    rhs1_.tail(m_) = sf_.h;

    rhs2_.resize(dim_K_);
    rhs2_.setZero();
    rhs2_.head(n_) = -sf_.c;

    resx0_ = std::max(1.0, sf_.c.norm());
    resy0_ = std::max(1.0, sf_.b.norm());
    resz0_ = std::max(1.0, sf_.h.norm());

    W_times_dzaff_.resize(m_);
    dsaff_by_W_.resize(m_);
    dsaff_.resize(m_);

    // Initialization: xhat = argmin ||Gx - h|| s.t. Ax = b, and the dual
    // analogue; slacks are shifted into the cone interior.
    Eigen::VectorXd dx1(n_), dy1(p_), dz1(m_);
    solveKKT(rhs1_, dx1, dy1, dz1, true);
    w_.x = dx1;
    bringToCone(-dz1, w_.s);

    Eigen::VectorXd dx2(n_), dy2(p_), dz2(m_);
    solveKKT(rhs2_, dx2, dy2, dz2, true);
    w_.y = dy2;
    bringToCone(dz2, w_.z);

    rhs1_.head(n_) = -sf_.c;

    w_.kap = 1.0;
    w_.tau = 1.0;
    w_.i = Info{};
    w_best_ = w_;

    ExitCode code = ExitCode::Fatal;
    double pres_prev = std::numeric_limits<double>::max();

    for (w_.i.iter = 0; w_.i.iter <= st_.iter_max; ++w_.i.iter) {
        computeResiduals();
        updateStatistics();

        // Backtrack to the best seen iterate if the update was destructive.
        if (w_.i.iter > 0 && (w_.i.pres > st_.safeguard * pres_prev || w_.i.gap < 0.0)) {
            w_ = w_best_;
            code = checkExitConditions(true);
            if (code == ExitCode::NotConvergedYet) code = ExitCode::Numerics;
            break;
        }
        pres_prev = w_.i.pres;

        code = checkExitConditions(false);
        if (code != ExitCode::NotConvergedYet) break;

        if (w_.i.iter > 0 && w_.i.step == st_.stepmin * st_.gamma) {
            w_ = w_best_;
            code = checkExitConditions(true);
            if (code == ExitCode::NotConvergedYet) code = ExitCode::Numerics;
            break;
        }
        if (w_.i.iter == st_.iter_max) {
            if (!w_.i.isBetterThan(w_best_.i)) w_ = w_best_;
            code = checkExitConditions(true);
            if (code == ExitCode::NotConvergedYet) code = ExitCode::MaxIterations;
            break;
        }
        if (std::isnan(w_.i.pcost)) {
            if (w_.i.iter > 0 && !w_.i.isBetterThan(w_best_.i)) {
                w_ = w_best_;
                code = checkExitConditions(true);
                if (code == ExitCode::NotConvergedYet) code = ExitCode::Numerics;
            } else {
                code = ExitCode::Numerics;
            }
            break;
        }

        if (w_.i.iter == 0 || w_.i.isBetterThan(w_best_.i)) w_best_ = w_;

        if (!updateScalings(w_.s, w_.z, w_.lambda)) {
            w_ = w_best_;
            code = checkExitConditions(true);
            if (code == ExitCode::NotConvergedYet) code = ExitCode::Numerics;
            break;
        }

        buildKKT(false);
        ldlt_.factorize(K_);
        if (ldlt_.info() != Eigen::Success) {
            code = ExitCode::Fatal;
            break;
        }

        solveKKT(rhs1_, dx1, dy1, dz1, false);

        // Affine (predictor) direction.
        rhsAffine();
        solveKKT(rhs2_, dx2, dy2, dz2, false);

        const double dtau_denom =
            w_.kap / w_.tau - sf_.c.dot(dx1) - (p_ > 0 ? sf_.b.dot(dy1) : 0.0) - sf_.h.dot(dz1);
        const double dtauaff = (rt_ - w_.kap + sf_.c.dot(dx2) +
                                (p_ > 0 ? sf_.b.dot(dy2) : 0.0) + sf_.h.dot(dz2)) /
                               dtau_denom;

        dz2 += dtauaff * dz1;
        scale(dz2, W_times_dzaff_);
        dsaff_by_W_ = -W_times_dzaff_ - w_.lambda;
        const double dkapaff = -w_.kap - w_.kap / w_.tau * dtauaff;

        const double step_aff =
            lineSearch(w_.lambda, dsaff_by_W_, W_times_dzaff_, w_.tau, dtauaff, w_.kap, dkapaff);

        const double sigma =
            std::clamp(std::pow(1.0 - step_aff, 3), st_.sigmamin, st_.sigmamax);
        w_.i.sigma = sigma;

        // Combined (predictor + corrector) direction.
        rhsCombined();
        solveKKT(rhs2_, dx2, dy2, dz2, false);

        const double bkap = w_.kap * w_.tau + dkapaff * dtauaff - sigma * w_.i.mu;
        const double dtau = ((1.0 - sigma) * rt_ - bkap / w_.tau + sf_.c.dot(dx2) +
                             (p_ > 0 ? sf_.b.dot(dy2) : 0.0) + sf_.h.dot(dz2)) /
                            dtau_denom;

        dx2 += dtau * dx1;
        dy2 += dtau * dy1;
        dz2 += dtau * dz1;

        scale(dz2, W_times_dzaff_);
        dsaff_by_W_ = -(dsaff_by_W_ + W_times_dzaff_);
        const double dkap = -(bkap + w_.kap * dtau) / w_.tau;

        w_.i.step = st_.gamma * lineSearch(w_.lambda, dsaff_by_W_, W_times_dzaff_, w_.tau, dtau,
                                           w_.kap, dkap);

        scale(dsaff_by_W_, dsaff_);

        w_.x += w_.i.step * dx2;
        w_.y += w_.i.step * dy2;
        w_.z += w_.i.step * dz2;
        w_.s += w_.i.step * dsaff_;
        w_.kap += w_.i.step * dkap;
        w_.tau += w_.i.step * dtau;
    }

    backscale();
    return code;
}

} // namespace

RelaxResult solve_relaxation(const ConicModel &model, const SocpOptions &opts) {
    Settings st;
    st.feastol = opts.feas_tol;
    st.abstol = opts.gap_tol;
    st.reltol = opts.gap_tol;
    st.iter_max = opts.max_iter;
    st.verbose = opts.verbose;

    StandardForm sf = to_standard_form(model);
    IpSolver solver(std::move(sf), st);
    const ExitCode code = solver.solve();
    const Iterate &w = solver.iterate();

    RelaxResult result;
    result.iterations = w.i.iter;
    result.max_primal_residual = w.i.pres;
    result.rel_duality_gap = std::fabs(w.i.gap) / std::max(1.0, std::fabs(w.i.pcost));

    switch (code) {
    case ExitCode::Optimal:
        result.status = RelaxStatus::Optimal;
        result.solution.assign(w.x.data(), w.x.data() + w.x.size());
        result.objective = objective_value(model, result.solution);
        result.dual_objective = w.i.dcost;
        break;
    case ExitCode::PrimalInfeasible:
    case ExitCode::CloseToPrimalInfeasible:
        result.status = RelaxStatus::Infeasible;
        result.objective = kInf;
        result.dual_objective = kInf;
        break;
    case ExitCode::DualInfeasible:
    case ExitCode::CloseToDualInfeasible:
        result.status = RelaxStatus::Unbounded;
        result.objective = -kInf;
        result.dual_objective = -kInf;
        break;
    default:
        result.status = RelaxStatus::NumericalFailure;
        result.objective = std::numeric_limits<double>::quiet_NaN();
        result.dual_objective = std::numeric_limits<double>::quiet_NaN();
        break;
    }
    return result;
}

} // namespace mamt
