#include "hypnet/evolve.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <sstream>
#include <unsupported/Eigen/MatrixFunctions>

#include "hypnet/linalg.hpp"
#include "hypnet/resolvent.hpp"
#include "hypnet/wellposed.hpp"

namespace hypnet {

namespace {

using Trip = Eigen::Triplet<cplx>;

void add_block(std::vector<Trip>& t, int r0, int c0, const Mat& m) {
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            if (m(i, j) != cplx(0)) t.emplace_back(r0 + i, c0 + j, m(i, j));
}

int end_node(const Slot& s, int n) { return s.end == End::Initial ? 0 : n; }

SpMat build(int r, int c, const std::vector<Trip>& t) {
    SpMat m(r, c);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

}  // namespace

Vec DiscreteGenerator::to_nodal(const StateVector& s) const {
    Vec v(nodal_dim);
    for (size_t e = 0; e < cells.size(); ++e) {
        const Mat& u = s.u[e];
        for (int j = 0; j < u.cols(); ++j) v.segment(node_offset[e] + j * u.rows(), u.rows()) = u.col(j);
    }
    v.tail(nodal_dim - x_start) = s.x;
    return v;
}

StateVector DiscreteGenerator::from_nodal(const Vec& v, const HyperbolicSystem& sys) const {
    StateVector s;
    for (size_t e = 0; e < cells.size(); ++e) {
        const int k = sys.graph.edge(static_cast<int>(e)).dim;
        Mat u(k, cells[e] + 1);
        for (int j = 0; j <= cells[e]; ++j) u.col(j) = v.segment(node_offset[e] + j * k, k);
        s.u.push_back(u);
    }
    s.x = v.tail(nodal_dim - x_start);
    return s;
}

Vec DiscreteGenerator::reduce(const StateVector& s, double* defect) const {
    Vec v = to_nodal(s);
    Eigen::SimplicialLLT<SpMat> llt(G);
    Vec r = llt.solve(Z.adjoint() * (W * v));
    if (defect) {
        Vec d = v - Z * r;
        const double nv = std::sqrt(std::max(0.0, v.dot(W * v).real()));
        const double nd = std::sqrt(std::max(0.0, d.dot(W * d).real()));
        *defect = nv > 0 ? nd / nv : 0.0;
    }
    return r;
}

StateVector DiscreteGenerator::expand(const Vec& r, const HyperbolicSystem& sys) const {
    return from_nodal(Z * r, sys);
}

double DiscreteGenerator::energy(const Vec& r) const { return std::max(0.0, r.dot(G * r).real()); }

DiscreteGenerator assemble_discrete_generator(const HyperbolicSystem& sys, const std::vector<int>& cells) {
    const auto& g = sys.graph;
    if (static_cast<int>(cells.size()) != g.num_edges())
        throw Error(ErrorCode::InvalidParameter, "one cell count per edge is required");
    DiscreteGenerator gen;
    gen.cells = cells;
    int off = 0, red = 0;
    std::vector<int> red_edge;
    for (int e = 0; e < g.num_edges(); ++e) {
        if (cells[e] < 4)
            throw Error(ErrorCode::GridTooCoarse, "edge '" + g.edge(e).id + "': at least 4 cells are required, got " +
                                                      std::to_string(cells[e]));
        gen.node_offset.push_back(off);
        off += g.edge(e).dim * (cells[e] + 1);
        red_edge.push_back(red);
        red += g.edge(e).dim * (cells[e] - 1);
    }
    gen.x_start = off;
    gen.nodal_dim = off + sys.total_dd();
    std::vector<int> red_block;
    for (const auto& b : sys.blocks) {
        red_block.push_back(red);
        red += static_cast<int>(b.Y.cols());
    }
    gen.reduced_dim = red;

    std::vector<Trip> ta, tw, tz;
    for (int e = 0; e < g.num_edges(); ++e) {
        const int n = cells[e], k = g.edge(e).dim;
        const double h = g.edge(e).length / n;
        auto node = [&](int j) { return gen.node_offset[e] + j * k; };
        for (int j = 0; j <= n; ++j) {
            const double x = j * h;
            Mat M = sys.M(e, x);
            if (j == 0) {
                add_block(ta, node(0), node(0), -M / h);
                add_block(ta, node(0), node(1), M / h);
            } else if (j == n) {
                add_block(ta, node(n), node(n - 1), -M / h);
                add_block(ta, node(n), node(n), M / h);
            } else {
                add_block(ta, node(j), node(j - 1), -M / (2 * h));
                add_block(ta, node(j), node(j + 1), M / (2 * h));
            }
            add_block(ta, node(j), node(j), sys.N(e, x));
            const double w = (j == 0 || j == n) ? 0.5 * h : h;
            add_block(tw, node(j), node(j), w * sys.Q(e, x));
            if (j > 0 && j < n) add_block(tz, node(j), red_edge[e] + (j - 1) * k, Mat::Identity(k, k));
        }
    }
    for (int bi = 0; bi < static_cast<int>(sys.blocks.size()); ++bi) {
        const auto& b = sys.blocks[bi];
        const int xr = gen.x_start + x_offset(sys, bi);
        for (const auto& s : b.slots) {
            const int k = g.edge(s.edge).dim;
            const int nd = gen.node_offset[s.edge] + end_node(s, cells[s.edge]) * k;
            add_block(tz, nd, red_block[bi], b.Y.middleRows(s.offset, k));
            if (b.dd() > 0) add_block(ta, xr, nd, (b.Yd.adjoint() * b.B).middleCols(s.offset, k));
        }
        if (b.dd() == 0) continue;
        add_block(ta, xr, xr, b.Yd.adjoint() * b.C * b.Yd);
        add_block(tw, xr, xr, vertex_gram(b));
        add_block(tz, xr, red_block[bi], b.Yd.adjoint() * b.Y);
    }
    gen.Afull = build(gen.nodal_dim, gen.nodal_dim, ta);
    gen.W = build(gen.nodal_dim, gen.nodal_dim, tw);
    gen.Z = build(gen.nodal_dim, gen.reduced_dim, tz);
    gen.G = SpMat(gen.Z.adjoint() * gen.W * gen.Z);
    SpMat rhs = SpMat(gen.Z.adjoint() * gen.W * gen.Afull * gen.Z);
    Eigen::SimplicialLLT<SpMat> llt(gen.G);
    if (llt.info() != Eigen::Success) throw Error(ErrorCode::Internal, "weighted Gram matrix is not positive definite");
    gen.A = llt.solve(rhs);
    gen.A.prune(cplx(0.0), 1e-300);
    return gen;
}

SpMat assemble_adjoint_nodal(const HyperbolicSystem& sys, const DiscreteGenerator& gen) {
    const auto& g = sys.graph;
    std::vector<Trip> ta;
    for (int e = 0; e < g.num_edges(); ++e) {
        const int n = gen.cells[e], k = g.edge(e).dim;
        const double h = g.edge(e).length / n;
        auto node = [&](int j) { return gen.node_offset[e] + j * k; };
        for (int j = 0; j <= n; ++j) {
            const double x = j * h;
            Mat M = sys.M(e, x), Q = sys.Q(e, x);
            Mat Qi = Q.inverse();
            if (j == 0) {
                add_block(ta, node(0), node(0), M / h);
                add_block(ta, node(0), node(1), -M / h);
            } else if (j == n) {
                add_block(ta, node(n), node(n - 1), M / h);
                add_block(ta, node(n), node(n), -M / h);
            } else {
                add_block(ta, node(j), node(j - 1), M / (2 * h));
                add_block(ta, node(j), node(j + 1), -M / (2 * h));
            }
            add_block(ta, node(j), node(j), Qi * (sys.N(e, x).adjoint() * Q - sys.dQM(e, x)));
        }
    }
    for (int bi = 0; bi < static_cast<int>(sys.blocks.size()); ++bi) {
        const auto& b = sys.blocks[bi];
        if (b.dd() == 0) continue;
        const int xr = gen.x_start + x_offset(sys, bi);
        Mat Gi = vertex_gram(b).inverse();
        Mat T = assemble_T(sys, b);
        for (const auto& s : b.slots) {
            const int k = g.edge(s.edge).dim;
            const int nd = gen.node_offset[s.edge] + end_node(s, gen.cells[s.edge]) * k;
            add_block(ta, xr, nd, (Gi * b.Yd.adjoint() * T).middleCols(s.offset, k));
        }
        add_block(ta, xr, xr, Gi * b.Yd.adjoint() * (b.B.adjoint() + b.C.adjoint()) * b.Q * b.Yd);
    }
    return build(gen.nodal_dim, gen.nodal_dim, ta);
}

namespace {

double max_speed(const HyperbolicSystem& sys) {
    double c = 0;
    for (int e = 0; e < sys.graph.num_edges(); ++e)
        for (double s : sys.check_nodes(e)) {
            Eigen::ComplexEigenSolver<Mat> es(sys.M(e, s * sys.graph.edge(e).length), false);
            c = std::max(c, es.eigenvalues().cwiseAbs().maxCoeff());
        }
    return c;
}

}  // namespace

Trajectory simulate(const HyperbolicSystem& sys, const DiscreteGenerator& gen, const StateVector& initial,
                    const SimulationOptions& opt) {
    if (!(opt.t_final >= 0) || opt.outputs < 1)
        throw Error(ErrorCode::InvalidParameter, "t_final must be >= 0 and outputs >= 1");
    Trajectory tr;
    Vec r = gen.reduce(initial, &tr.projection_defect);
    if (tr.projection_defect > sys.tol.proj) {
        std::ostringstream os;
        os << "initial data projected onto the constraints (relative change " << tr.projection_defect << ")";
        tr.warnings.push_back(os.str());
    }
    const double interval = opt.t_final / opt.outputs;
    const double e0 = gen.energy(r);

    auto record = [&](double t) {
        StateVector s = gen.expand(r, sys);
        const double E = gen.energy(r);
        tr.t.push_back(t);
        tr.energy.push_back(E);
        tr.constraint_residual.push_back(constraint_residual(sys, s));
        if (opt.keep_states) tr.states.push_back(std::move(s));
        if (e0 > 0 && !(E <= 1e10 * e0)) {
            std::ostringstream os;
            os << "energy grew from " << e0 << " to " << E << " by t=" << t;
            throw Error(ErrorCode::BlowupDetected, os.str());
        }
    };
    record(0.0);
    if (interval == 0.0) return tr;

    if (opt.method == Method::Expm) {
        if (gen.reduced_dim > 4000)
            throw Error(ErrorCode::DimensionTooLargeForExpm,
                        "dense exponential limited to dimension 4000, got " + std::to_string(gen.reduced_dim));
        const int sub = opt.dt > 0 ? static_cast<int>(std::ceil(interval / opt.dt - 1e-12)) : 1;
        tr.dt = interval / sub;
        Mat Ad = Mat(gen.A) * cplx(tr.dt);
        Mat E = Ad.exp();
        for (int i = 1; i <= opt.outputs; ++i) {
            for (int s = 0; s < sub; ++s) r = E * r;
            tr.steps += sub;
            record(i * interval);
        }
        return tr;
    }

    double hmin = std::numeric_limits<double>::infinity();
    for (int e = 0; e < sys.graph.num_edges(); ++e) hmin = std::min(hmin, sys.graph.edge(e).length / gen.cells[e]);
    const double speed = std::max(max_speed(sys), 1e-300);
    const double dt_cfl = opt.cfl * hmin / speed;
    const double dt_req = opt.dt > 0 ? opt.dt : dt_cfl;
    const int sub = std::max(1, static_cast<int>(std::ceil(interval / dt_req - 1e-12)));
    tr.dt = interval / sub;
    for (int i = 1; i <= opt.outputs; ++i) {
        for (int s = 0; s < sub; ++s) {
            Vec k1 = gen.A * r;
            Vec k2 = gen.A * (r + 0.5 * tr.dt * k1);
            Vec k3 = gen.A * (r + 0.5 * tr.dt * k2);
            Vec k4 = gen.A * (r + tr.dt * k3);
            r += (tr.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        tr.steps += sub;
        record(i * interval);
    }
    return tr;
}

DissipationCheck dissipativity_residual(const HyperbolicSystem& sys, const SmoothState& u, const std::vector<int>& cells,
                                        double lambda) {
    StateVector s = u.sample(cells);
    StateVector Au = apply_A(sys, s, u.sample_derivative(cells), OperatorKind::Full);
    const double norm2 = energy(sys, s);
    DissipationCheck d;
    d.lhs = inner_d(sys, Au, s).real() - lambda * norm2;
    double sum = 0;
    for (int e = 0; e < sys.graph.num_edges(); ++e) {
        const int n = cells[e];
        const double h = sys.graph.edge(e).length / n;
        for (int j = 0; j <= n; ++j) {
            const double x = j * h, w = (j == 0 || j == n) ? 0.5 * h : h;
            Mat Q = sys.Q(e, x), N = sys.N(e, x);
            Mat F = Q * N + N.adjoint() * Q - sys.dQM(e, x);
            sum += w * s.u[e].col(j).dot(F * s.u[e].col(j)).real();
        }
    }
    for (int bi = 0; bi < static_cast<int>(sys.blocks.size()); ++bi) {
        const auto& b = sys.blocks[bi];
        Vec t = block_trace(sys, s.u, bi);
        sum += t.dot(boundary_form(sys, bi) * t).real();
        if (b.dd() == 0) continue;
        Vec xb = s.x.segment(x_offset(sys, bi), b.dd());
        Mat CF = b.Yd.adjoint() * (b.Q * b.C + b.C.adjoint() * b.Q) * b.Yd;
        sum += xb.dot(CF * xb).real();
    }
    d.rhs = 0.5 * sum - lambda * norm2;
    d.residual = std::abs(d.lhs - d.rhs);
    return d;
}

StateVector apply_adjoint_exact(const HyperbolicSystem& sys, const SmoothState& v, const std::vector<int>& cells) {
    StateVector s = v.sample(cells);
    std::vector<Mat> dv = v.sample_derivative(cells);
    StateVector out;
    for (int e = 0; e < sys.graph.num_edges(); ++e) {
        const int n = cells[e];
        const double h = sys.graph.edge(e).length / n;
        Mat r(s.u[e].rows(), n + 1);
        for (int j = 0; j <= n; ++j) {
            const double x = j * h;
            Mat M = sys.M(e, x), Q = sys.Q(e, x);
            r.col(j) = -M * dv[e].col(j) + Q.partialPivLu().solve((sys.N(e, x).adjoint() * Q - sys.dQM(e, x)) * s.u[e].col(j));
        }
        out.u.push_back(r);
    }
    out.x = Vec::Zero(sys.total_dd());
    for (int bi = 0; bi < static_cast<int>(sys.blocks.size()); ++bi) {
        const auto& b = sys.blocks[bi];
        if (b.dd() == 0) continue;
        const int off = x_offset(sys, bi);
        Vec y = b.Yd * s.x.segment(off, b.dd());
        Vec w = assemble_T(sys, b) * block_trace(sys, s.u, bi) + (b.B.adjoint() + b.C.adjoint()) * (b.Q * y);
        out.x.segment(off, b.dd()) = vertex_gram(b).ldlt().solve(b.Yd.adjoint() * w);
    }
    return out;
}

AdjointCheck adjoint_consistency(const HyperbolicSystem& sys, const DiscreteGenerator& gen, const SmoothState& u,
                                 const SmoothState& v) {
    StateVector us = u.sample(gen.cells), vs = v.sample(gen.cells);
    Vec r = gen.reduce(us);
    StateVector Au = gen.expand(gen.A * r, sys);
    StateVector Av = apply_adjoint_exact(sys, v, gen.cells);
    AdjointCheck c;
    c.defect = std::abs(inner_d(sys, Au, vs) - inner_d(sys, us, Av));
    Vec un = gen.to_nodal(us), vn = gen.to_nodal(vs);
    SpMat Astar = assemble_adjoint_nodal(sys, gen);
    Vec Aun = gen.Afull * un, Avn = Astar * vn;
    c.sbp_defect = std::abs(vn.dot(gen.W * Aun) - Avn.dot(gen.W * un));
    c.scale = d_norm(sys, us) * d_norm(sys, vs);
    return c;
}

double skew_defect(const DiscreteGenerator& gen) {
    Mat A(gen.A), G(gen.G);
    Mat Adag = G.ldlt().solve(A.adjoint() * G);
    return (A + Adag).norm() / std::max(1e-300, A.norm());
}

}  // namespace hypnet
