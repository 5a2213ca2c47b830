#include "hypnet/resolvent.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <sstream>

#include "hypnet/linalg.hpp"
#include "hypnet/wellposed.hpp"

namespace hypnet {

BoundaryProblem boundary_problem(const HyperbolicSystem& sys) {
    BoundaryProblem bp;
    const double rt = sys.tol.rank;
    for (int bi = 0; bi < static_cast<int>(sys.blocks.size()); ++bi) {
        const auto& b = sys.blocks[bi];
        Mat Yperp = la::complement(b.Y, b.dim);
        for (int i = 0; i < Yperp.cols(); ++i) bp.rows.push_back({bi, BoundaryProblem::Row::Stationary, Yperp.col(i), Vec()});
        if (b.dd() == 0) continue;
        Mat R = la::orth(b.B, rt, 1.0);
        for (int i = 0; i < R.cols(); ++i)
            bp.rows.push_back({bi, BoundaryProblem::Row::RangeBstar, b.B.adjoint() * R.col(i), R.col(i)});
        Mat K = b.Yd * la::null_space(b.B.adjoint() * b.Yd, rt, 1.0);
        for (int i = 0; i < K.cols(); ++i) bp.rows.push_back({bi, BoundaryProblem::Row::KernelBstar, K.col(i), Vec()});
    }
    bp.matrix.resize(bp.rows.size(), sys.graph.k());
    for (size_t r = 0; r < bp.rows.size(); ++r) {
        const auto& row = bp.rows[r];
        bp.matrix.row(r) = extend_to_edges(sys, row.block, row.w).col(0).adjoint();
    }
    return bp;
}

ResolventSolution solve_A0(const HyperbolicSystem& sys, const std::vector<Mat>& f, const Vec& g) {
    const auto& gr = sys.graph;
    if (static_cast<int>(f.size()) != gr.num_edges())
        throw Error(ErrorCode::InvalidParameter, "right-hand side must be given on every edge");
    if (g.size() != sys.total_dd())
        throw Error(ErrorCode::InvalidParameter, "vertex right-hand side must have " + std::to_string(sys.total_dd()) +
                                                     " coordinates");
    BoundaryProblem bp = boundary_problem(sys);
    const int k = gr.k();
    if (bp.matrix.rows() != k)
        throw Error(ErrorCode::SingularBoundarySystem, "boundary system has " + std::to_string(bp.matrix.rows()) +
                                                           " conditions for " + std::to_string(k) + " unknowns");
    Eigen::JacobiSVD<Mat> svd(bp.matrix, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RVec& sv = svd.singularValues();
    const double cond = sv(k - 1) > 0 ? sv(0) / sv(k - 1) : std::numeric_limits<double>::infinity();
    if (!(cond <= 1.0 / sys.tol.rank)) {
        std::ostringstream os;
        os << "boundary system is singular (condition number " << cond << ")";
        throw Error(ErrorCode::SingularBoundarySystem, os.str());
    }

    // Particular solution: cumulative trapezoid of M^-1 f from x = 0.
    std::vector<Mat> unh;
    for (int e = 0; e < gr.num_edges(); ++e) {
        const int ke = gr.edge(e).dim;
        const Mat& fe = f[e];
        if (fe.rows() != ke || fe.cols() < 2)
            throw Error(ErrorCode::InvalidParameter, "edge '" + gr.edge(e).id + "': right-hand side needs " +
                                                         std::to_string(ke) + " rows and at least two nodes");
        const int m = static_cast<int>(fe.cols()) - 1;
        const double h = gr.edge(e).length / m;
        Mat mf(ke, m + 1), ue = Mat::Zero(ke, m + 1);
        for (int j = 0; j <= m; ++j) mf.col(j) = sys.M(e, j * h).partialPivLu().solve(fe.col(j));
        for (int j = 1; j <= m; ++j) ue.col(j) = ue.col(j - 1) + 0.5 * h * (mf.col(j - 1) + mf.col(j));
        unh.push_back(ue);
    }

    Vec rhs(k);
    std::vector<Vec> tnh;
    for (int bi = 0; bi < static_cast<int>(sys.blocks.size()); ++bi) tnh.push_back(block_trace(sys, unh, bi));
    for (int r = 0; r < k; ++r) {
        const auto& row = bp.rows[r];
        const auto& b = sys.blocks[row.block];
        Vec gamb = b.dd() > 0 ? Vec(b.Yd * g.segment(x_offset(sys, row.block), b.dd())) : Vec::Zero(b.dim);
        cplx v = -row.w.dot(tnh[row.block]);
        if (row.kind == BoundaryProblem::Row::RangeBstar) v += row.y.dot(gamb);
        if (row.kind == BoundaryProblem::Row::KernelBstar) v -= row.w.dot(gamb);
        rhs(r) = v;
    }
    Vec K = svd.solve(rhs);

    ResolventSolution out;
    out.condition = cond;
    out.boundary_residual = (bp.matrix * K - rhs).cwiseAbs().maxCoeff();
    out.state.u = unh;
    for (int e = 0; e < gr.num_edges(); ++e)
        out.state.u[e].colwise() += K.segment(gr.edge_offset(e), gr.edge(e).dim);
    out.state.x = Vec::Zero(sys.total_dd());
    for (int bi = 0; bi < static_cast<int>(sys.blocks.size()); ++bi) {
        const auto& b = sys.blocks[bi];
        if (b.dd() > 0) out.state.x.segment(x_offset(sys, bi), b.dd()) = b.Yd.adjoint() * block_trace(sys, out.state.u, bi);
    }
    return out;
}

std::vector<Mat> differentiate(const HyperbolicSystem& sys, const std::vector<Mat>& u) {
    std::vector<Mat> out;
    for (int e = 0; e < static_cast<int>(u.size()); ++e) {
        const Mat& ue = u[e];
        const int n = static_cast<int>(ue.cols()) - 1;
        if (n < 4)
            throw Error(ErrorCode::GridTooCoarse, "edge '" + sys.graph.edge(e).id + "': at least 4 cells are required");
        const double h = sys.graph.edge(e).length / n;
        Mat d(ue.rows(), n + 1);
        auto c = [&](int j) { return ue.col(j); };
        d.col(0) = (-25.0 * c(0) + 48.0 * c(1) - 36.0 * c(2) + 16.0 * c(3) - 3.0 * c(4)) / (12 * h);
        d.col(1) = (-3.0 * c(0) - 10.0 * c(1) + 18.0 * c(2) - 6.0 * c(3) + c(4)) / (12 * h);
        for (int j = 2; j <= n - 2; ++j) d.col(j) = (c(j - 2) - 8.0 * c(j - 1) + 8.0 * c(j + 1) - c(j + 2)) / (12 * h);
        d.col(n - 1) = (3.0 * c(n) + 10.0 * c(n - 1) - 18.0 * c(n - 2) + 6.0 * c(n - 3) - c(n - 4)) / (12 * h);
        d.col(n) = (25.0 * c(n) - 48.0 * c(n - 1) + 36.0 * c(n - 2) - 16.0 * c(n - 3) + 3.0 * c(n - 4)) / (12 * h);
        out.push_back(d);
    }
    return out;
}

StateVector apply_A(const HyperbolicSystem& sys, const StateVector& s, OperatorKind kind) {
    return apply_A(sys, s, differentiate(sys, s.u), kind);
}

StateVector apply_A(const HyperbolicSystem& sys, const StateVector& s, const std::vector<Mat>& du, OperatorKind kind) {
    const auto& gr = sys.graph;
    StateVector out;
    out.x = Vec::Zero(sys.total_dd());
    for (int bi = 0; bi < static_cast<int>(sys.blocks.size()); ++bi) {
        const auto& b = sys.blocks[bi];
        Vec t = block_trace(sys, s.u, bi);
        const double scale = std::max(1.0, t.norm());
        const double off_y = (t - b.Y * (b.Y.adjoint() * t)).norm();
        if (off_y > sys.tol.sub * scale)
            throw Error(ErrorCode::DomainViolation, b.name + ": trace leaves Y by " + std::to_string(off_y));
        if (b.dd() == 0) continue;
        const int off = x_offset(sys, bi);
        Vec xb = s.x.segment(off, b.dd());
        const double mism = (xb - b.Yd.adjoint() * t).norm();
        if (mism > sys.tol.sub * scale)
            throw Error(ErrorCode::DomainViolation, b.name + ": x differs from the Yd part of the trace by " +
                                                        std::to_string(mism));
        Vec xa = b.Yd * xb;
        Vec rhs = b.B * t;
        if (kind == OperatorKind::Full) {
            rhs += b.C * xa;
        } else {
            rhs -= projectors(b, sys.tol.rank).Pd0 * xa;
        }
        out.x.segment(off, b.dd()) = b.Yd.adjoint() * rhs;
    }
    for (int e = 0; e < gr.num_edges(); ++e) {
        const int n = static_cast<int>(s.u[e].cols()) - 1;
        const double h = gr.edge(e).length / n;
        Mat r(s.u[e].rows(), n + 1);
        for (int j = 0; j <= n; ++j) {
            r.col(j) = sys.M(e, j * h) * du[e].col(j);
            if (kind == OperatorKind::Full) r.col(j) += sys.N(e, j * h) * s.u[e].col(j);
        }
        out.u.push_back(r);
    }
    return out;
}

double d_norm(const HyperbolicSystem& sys, const StateVector& s) { return std::sqrt(energy(sys, s)); }

}  // namespace hypnet
