#include "hypnet/wellposed.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "hypnet/linalg.hpp"

namespace hypnet {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

Mat kerBstar_in_Yd(const ConditionBlock& b, double rank_tol) {
    if (b.dd() == 0) return Mat(b.dim, 0);
    Mat K = la::null_space(b.B.adjoint() * b.Yd, rank_tol, 1.0);
    return b.Yd * K;
}

Mat ranB(const ConditionBlock& b, double rank_tol) { return la::orth(b.B, rank_tol, 1.0); }

// Least-squares t with F = t W, if the fit is exact within tolerance and t >= 0.
std::optional<double> proportional(const Mat& F, const Mat& W, double tol) {
    Mat Fh = la::herm(F);
    const double scale = std::max(1.0, Fh.norm());
    const double ww = W.squaredNorm();
    if (ww == 0.0) {
        if (Fh.norm() <= tol * scale) return 0.0;
        return std::nullopt;
    }
    double t = (W.adjoint() * Fh).trace().real() / ww;
    if (std::abs(t) * std::sqrt(ww) <= tol * scale) t = 0.0;
    if ((Fh - t * W).norm() > tol * scale) return std::nullopt;
    if (t < 0) return std::nullopt;
    return t;
}
}  // namespace

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Semigroup: return "semigroup";
        case Verdict::ContractiveSemigroup: return "contractive_semigroup";
        case Verdict::Group: return "group";
        case Verdict::UnitaryGroup: return "unitary_group";
        default: return "inconclusive";
    }
}

const char* route_name(Route r) {
    switch (r) {
        case Route::Basis: return "basis";
        case Route::Adjoint: return "adjoint";
        default: return "none";
    }
}

Projectors projectors(const ConditionBlock& b, double rank_tol) {
    Projectors p;
    p.Pd = b.Pd();
    p.PY = b.PY();
    Mat K = kerBstar_in_Yd(b, rank_tol);
    p.Pd0 = K * K.adjoint();
    p.Pdperp = p.PY - p.Pd;
    return p;
}

ConeCheckResult cone_check(const Mat& F, const Mat& S, ConeMode mode, double tol_eig) {
    ConeCheckResult r;
    r.mode = mode;
    r.dim = static_cast<int>(S.cols());
    if (S.cols() == 0) {
        r.holds = true;
        r.witness = Vec(F.rows());
        r.witness.setZero();
        return r;
    }
    Mat Fs = la::herm(S.adjoint() * F * S);
    Eigen::SelfAdjointEigenSolver<Mat> es(Fs);
    const RVec& ev = es.eigenvalues();
    int idx = static_cast<int>(ev.size()) - 1;
    if (mode == ConeMode::Null && std::abs(ev(0)) > std::abs(ev(idx))) idx = 0;
    r.extremal = mode == ConeMode::Null ? std::abs(ev(idx)) : ev(idx);
    r.witness = S * es.eigenvectors().col(idx);
    r.holds = r.extremal <= tol_eig * std::max(1.0, la::herm(F).norm());
    return r;
}

double min_shift(const Mat& F, const Mat& W, double tol_eig) {
    const int n = static_cast<int>(F.rows());
    if (n == 0) return 0.0;
    Mat Fh = la::herm(F);
    const double tolF = tol_eig * std::max(1.0, Fh.norm());
    if (la::herm_eigenvalues(Fh)(n - 1) <= tolF) return 0.0;

    Eigen::SelfAdjointEigenSolver<Mat> ew(la::herm(W));
    const RVec& w = ew.eigenvalues();
    const double wmax = std::max(0.0, w.maxCoeff());
    std::vector<int> ridx, nidx;
    for (int i = 0; i < n; ++i) (w(i) > tol_eig * std::max(1.0, wmax) ? ridx : nidx).push_back(i);
    if (ridx.empty()) return kInf;
    Mat UR(n, ridx.size()), UN(n, nidx.size());
    RVec wR(ridx.size());
    for (size_t i = 0; i < ridx.size(); ++i) {
        UR.col(i) = ew.eigenvectors().col(ridx[i]);
        wR(i) = w(ridx[i]);
    }
    for (size_t i = 0; i < nidx.size(); ++i) UN.col(i) = ew.eigenvectors().col(nidx[i]);

    Mat S0 = UR.adjoint() * Fh * UR;
    if (UN.cols() > 0) {
        Eigen::SelfAdjointEigenSolver<Mat> en(la::herm(UN.adjoint() * Fh * UN));
        const RVec& e = en.eigenvalues();
        if (e.maxCoeff() > tolF) return kInf;
        std::vector<int> zero, neg;
        for (int i = 0; i < e.size(); ++i) (std::abs(e(i)) <= tolF ? zero : neg).push_back(i);
        if (!zero.empty()) {
            Mat N0(n, zero.size());
            for (size_t i = 0; i < zero.size(); ++i) N0.col(i) = UN * en.eigenvectors().col(zero[i]);
            if ((N0.adjoint() * Fh * UR).norm() > tolF) return kInf;
        }
        if (!neg.empty()) {
            Mat Nm(n, neg.size());
            RVec d(neg.size());
            for (size_t i = 0; i < neg.size(); ++i) {
                Nm.col(i) = UN * en.eigenvectors().col(neg[i]);
                d(i) = e(neg[i]);
            }
            Mat X = Nm.adjoint() * Fh * UR;
            S0 -= X.adjoint() * d.cwiseInverse().cast<cplx>().asDiagonal() * X;
        }
    }
    RVec s = wR.cwiseSqrt().cwiseInverse();
    Mat G = s.cast<cplx>().asDiagonal() * la::herm(S0) * s.cast<cplx>().asDiagonal();
    const double lam = la::herm_eigenvalues(G).maxCoeff();
    return lam > 0 ? lam : 0.0;
}

Mat boundary_form(const HyperbolicSystem& sys, int block) {
    const auto& b = sys.blocks[block];
    return assemble_T(sys, b) + b.Q * b.B + b.B.adjoint() * b.Q;
}

double min_lambda(const HyperbolicSystem& sys, int block) {
    const auto& b = sys.blocks[block];
    Mat F = boundary_form(sys, block);
    return min_shift(b.Y.adjoint() * F * b.Y, b.Y.adjoint() * b.Q * b.Y, sys.tol.eig);
}

WvResult build_Wv(const HyperbolicSystem& sys, int block) {
    const auto& b = sys.blocks[block];
    const double rt = sys.tol.rank;
    Mat Yperp = la::complement(b.Y, b.dim);
    Mat R = ranB(b, rt);
    Mat BR = b.B.adjoint() * R;
    Mat K = kerBstar_in_Yd(b, rt);
    WvResult w;
    w.n_perp = static_cast<int>(Yperp.cols());
    w.n_ranB = static_cast<int>(BR.cols());
    w.n_kerB = static_cast<int>(K.cols());
    w.vectors.resize(b.dim, w.n_perp + w.n_ranB + w.n_kerB);
    w.vectors << Yperp, BR, K;
    w.Z = la::orth(w.vectors, rt, 1.0);
    return w;
}

Mat extend_to_edges(const HyperbolicSystem& sys, int block, const Mat& w) {
    const auto& b = sys.blocks[block];
    Mat out = Mat::Zero(sys.graph.k(), w.cols());
    for (const auto& s : b.slots) {
        const int d = sys.graph.edge(s.edge).dim;
        out.middleRows(sys.graph.edge_offset(s.edge), d) += w.middleRows(s.offset, d);
    }
    return out;
}

BasisConditionResult basis_condition(const HyperbolicSystem& sys) {
    BasisConditionResult r;
    r.k = sys.graph.k();
    std::vector<Mat> cols;
    bool all_stationary = true, all_surj = true;
    int id_stat = 0, id_surj = 0;
    for (int bi = 0; bi < static_cast<int>(sys.blocks.size()); ++bi) {
        const auto& b = sys.blocks[bi];
        WvResult w = build_Wv(sys, bi);
        BasisConditionResult::PerBlock pb;
        pb.name = b.name;
        pb.dim_Yperp = w.n_perp;
        pb.dim_ranBstar = w.n_ranB;
        pb.dim_kerBstar = w.n_kerB;
        pb.dim_Z = static_cast<int>(w.Z.cols());
        pb.dim_Y = static_cast<int>(b.Y.cols());
        pb.dim_Yd = b.dd();
        pb.B_surjective = w.n_ranB == b.dd();
        all_stationary = all_stationary && b.dd() == 0;
        all_surj = all_surj && pb.B_surjective;
        id_stat += pb.dim_Y;
        id_surj += pb.dim_Y - pb.dim_Yd;
        r.count += static_cast<int>(w.vectors.cols());
        cols.push_back(extend_to_edges(sys, bi, w.vectors));
        r.blocks.push_back(pb);
    }
    Mat all(r.k, r.count);
    int c = 0;
    for (const auto& m : cols) {
        all.middleCols(c, m.cols()) = m;
        c += static_cast<int>(m.cols());
    }
    r.dim_span = la::rank(all, sys.tol.rank, 1.0);
    r.holds = r.dim_span == r.k && r.count == r.k;
    if (all_stationary) {
        r.shortcut = Shortcut::Stationary;
        r.shortcut_identity = id_stat == r.k;
    } else if (all_surj) {
        r.shortcut = Shortcut::SurjectiveB;
        r.shortcut_identity = id_surj == r.k;
    }
    return r;
}

Mat adjoint_space(const HyperbolicSystem& sys, int block) {
    const auto& b = sys.blocks[block];
    Projectors p = projectors(b, sys.tol.rank);
    Mat T = assemble_T(sys, b);
    Mat A(b.dim, b.dim + b.dd());
    A << p.Pdperp * T, p.Pdperp * b.B.adjoint() * b.Q * b.Yd;
    return la::null_space(A, sys.tol.rank, 1.0);
}

Mat adjoint_form(const HyperbolicSystem& sys, int block, double mu) {
    const auto& b = sys.blocks[block];
    const int n = b.dim, d = b.dd();
    Mat T = assemble_T(sys, b);
    Mat F(n + d, n + d);
    F.topLeftCorner(n, n) = -T - 2.0 * mu * Mat::Identity(n, n);
    F.topRightCorner(n, d) = T * b.Yd;
    F.bottomLeftCorner(d, n) = b.Yd.adjoint() * T;
    F.bottomRightCorner(d, d) =
        b.Yd.adjoint() * (b.B.adjoint() * b.Q + b.Q * b.B) * b.Yd - 2.0 * mu * b.Yd.adjoint() * b.Q * b.Yd;
    return la::herm(F);
}

namespace {
Mat adjoint_weight(const ConditionBlock& b) {
    const int n = b.dim, d = b.dd();
    Mat D = Mat::Zero(n + d, n + d);
    D.topLeftCorner(n, n) = 2.0 * Mat::Identity(n, n);
    D.bottomRightCorner(d, d) = 2.0 * b.Yd.adjoint() * b.Q * b.Yd;
    return D;
}
}  // namespace

ConeCheckResult adjoint_cone_check(const HyperbolicSystem& sys, int block, double mu, ConeMode mode) {
    return cone_check(adjoint_form(sys, block, mu), adjoint_space(sys, block), mode, sys.tol.eig);
}

double adjoint_min_mu(const HyperbolicSystem& sys, int block) {
    Mat S = adjoint_space(sys, block);
    if (S.cols() == 0) return 0.0;
    Mat F0 = adjoint_form(sys, block, 0.0);
    Mat D = adjoint_weight(sys.blocks[block]);
    return min_shift(S.adjoint() * F0 * S, S.adjoint() * D * S, sys.tol.eig);
}

double yd_cone_lambda(const HyperbolicSystem& sys, int block) {
    const auto& b = sys.blocks[block];
    if (b.dd() == 0) return 0.0;
    Mat F = boundary_form(sys, block);
    return min_shift(b.Yd.adjoint() * F * b.Yd, b.Yd.adjoint() * b.Q * b.Yd, sys.tol.eig);
}

ClassificationReport classify(const HyperbolicSystem& sys) {
    ClassificationReport rep;
    const auto& tol = sys.tol;
    rep.assumptions_ok = validate_assumptions(sys).ok;
    rep.basis = basis_condition(sys);
    rep.basis_ok = rep.basis.holds;

    // Edge form Q N + N* Q - (Q M)' at sample nodes.
    for (int e = 0; e < sys.graph.num_edges(); ++e) {
        for (double s : sys.check_nodes(e)) {
            const double x = s * sys.graph.edge(e).length;
            Mat Q = sys.Q(e, x), N = sys.N(e, x);
            Mat E = Q * N + N.adjoint() * Q - sys.dQM(e, x);
            RVec ev = la::herm_eigenvalues(E);
            const double scale = std::max(1.0, E.norm());
            const double mx = ev.maxCoeff(), ab = ev.cwiseAbs().maxCoeff();
            if (mx > rep.edge_form.max_eig) {
                rep.edge_form.max_eig = mx;
                rep.edge_form.location = "edge '" + sys.graph.edge(e).id + "' at x=" + std::to_string(x);
            }
            rep.edge_form.max_abs = std::max(rep.edge_form.max_abs, ab);
            if (mx > tol.eig * scale) rep.edge_form.nonpositive = false;
            if (ab > tol.eig * scale) rep.edge_form.null = false;
        }
    }

    bool basis_semigroup = rep.basis_ok, basis_group = rep.basis_ok, c_nonpos = true, c_null = true;
    bool combined_nonpos = true;
    bool adj_group = true, adj_zero = true, adj_null_zero = true, adj_c_null = true;
    double lam_max = 0, yd_max = 0, mu_max = 0;
    for (int bi = 0; bi < static_cast<int>(sys.blocks.size()); ++bi) {
        const auto& b = sys.blocks[bi];
        ClassificationReport::BlockInfo info;
        info.name = b.name;
        Mat F = boundary_form(sys, bi);
        info.min_lambda = min_lambda(sys, bi);
        info.null_cone = cone_check(F, b.Y, ConeMode::Null, tol.eig);
        info.yd_lambda = yd_cone_lambda(sys, bi);
        Mat S = adjoint_space(sys, bi);
        info.adjoint_dim = static_cast<int>(S.cols());
        info.adjoint_mu = adjoint_min_mu(sys, bi);
        if (b.dd() == 0) {
            info.yd_null_lambda = 0.0;
        } else {
            info.yd_null_lambda = proportional(b.Yd.adjoint() * F * b.Yd, b.Yd.adjoint() * b.Q * b.Yd, tol.eig);
        }
        info.y_null_lambda = proportional(b.Y.adjoint() * F * b.Y, b.Y.adjoint() * b.Q * b.Y, tol.eig);
        if (S.cols() == 0) {
            info.adjoint_null_mu = 0.0;
        } else {
            Mat F0 = adjoint_form(sys, bi, 0.0);
            info.adjoint_null_mu = proportional(S.adjoint() * F0 * S, S.adjoint() * adjoint_weight(b) * S, tol.eig);
        }
        Mat CF = b.Q * b.C + b.C.adjoint() * b.Q;
        info.c_cone = cone_check(CF, b.Yd, ConeMode::Nonpositive, tol.eig);
        info.c_null = cone_check(CF, b.Yd, ConeMode::Null, tol.eig);
        Mat D = Mat::Zero(b.dim + b.dd(), b.dim + b.dd());
        D.bottomRightCorner(b.dd(), b.dd()) = b.Yd.adjoint() * CF * b.Yd;
        info.adjoint_c_null = cone_check(D, S, ConeMode::Null, tol.eig);
        info.combined_cone = cone_check(F + b.Pd() * CF * b.Pd(), b.Y, ConeMode::Nonpositive, tol.eig);

        basis_semigroup = basis_semigroup && std::isfinite(info.min_lambda);
        basis_group = basis_group && info.null_cone.holds;
        lam_max = std::max(lam_max, info.min_lambda);
        yd_max = std::max(yd_max, info.yd_lambda);
        mu_max = std::max(mu_max, info.adjoint_mu);
        c_nonpos = c_nonpos && info.c_cone.holds;
        c_null = c_null && info.c_null.holds;
        combined_nonpos = combined_nonpos && info.combined_cone.holds;
        adj_group = adj_group && info.yd_null_lambda && info.y_null_lambda && info.adjoint_null_mu;
        adj_zero = adj_zero && info.min_lambda == 0.0 && info.adjoint_mu == 0.0;
        adj_null_zero = adj_null_zero && info.null_cone.holds && info.adjoint_null_mu && *info.adjoint_null_mu == 0.0;
        adj_c_null = adj_c_null && info.adjoint_c_null.holds;
        rep.blocks.push_back(info);
    }

    if (!rep.assumptions_ok) return rep;

    // Basis route.
    if (basis_semigroup) {
        rep.semigroup_lambda = lam_max;
        rep.group_ok = basis_group;
        // The boundary and vertex terms may also be summed before the sign test.
        bool contractive = rep.edge_form.nonpositive && ((lam_max == 0.0 && c_nonpos) || combined_nonpos);
        bool unitary = basis_group && rep.edge_form.null && c_null;
        rep.basis_verdict = unitary ? Verdict::UnitaryGroup
                            : basis_group ? Verdict::Group
                            : contractive ? Verdict::ContractiveSemigroup
                                          : Verdict::Semigroup;
        rep.contractive = rep.contractive || contractive || unitary;
        rep.unitary = rep.unitary || unitary;
    }

    // Adjoint route: dissipativity of the operator itself still needs the cone on all of Y; the Yd
    // restriction alone would accept systems without any boundary condition.
    rep.adjoint_route.yd_cone_lambda = yd_max;
    rep.adjoint_route.adjoint_cone_mu = mu_max;
    rep.adjoint_route.y_cone_lambda = lam_max;
    rep.adjoint_route.holds = std::isfinite(lam_max) && std::isfinite(yd_max) && std::isfinite(mu_max);
    rep.adjoint_route.group = rep.adjoint_route.holds && adj_group;
    if (rep.adjoint_route.holds) {
        bool contractive = rep.edge_form.nonpositive && ((adj_zero && c_nonpos) || (combined_nonpos && mu_max == 0.0));
        bool unitary = adj_group && adj_null_zero && rep.edge_form.null && c_null && adj_c_null;
        rep.adjoint_verdict = unitary ? Verdict::UnitaryGroup
                              : rep.adjoint_route.group ? Verdict::Group
                              : contractive ? Verdict::ContractiveSemigroup
                                            : Verdict::Semigroup;
        rep.contractive = rep.contractive || contractive || unitary;
        rep.unitary = rep.unitary || unitary;
    }

    rep.verdict = std::max(rep.basis_verdict, rep.adjoint_verdict);
    if (rep.basis_verdict != Verdict::Inconclusive)
        rep.route = Route::Basis;
    else if (rep.adjoint_verdict != Verdict::Inconclusive)
        rep.route = Route::Adjoint;
    return rep;
}

}  // namespace hypnet
