#include "hypnet/system.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "hypnet/linalg.hpp"

namespace hypnet {

MatrixField::MatrixField(std::vector<Mat> samples) : samples_(std::move(samples)) {
    if (samples_.empty()) throw Error(ErrorCode::InvalidParameter, "matrix field without samples");
    for (const auto& s : samples_)
        if (s.rows() != samples_[0].rows() || s.cols() != samples_[0].cols())
            throw Error(ErrorCode::InvalidParameter, "matrix field samples differ in shape");
}

Mat MatrixField::at(double s) const {
    if (samples_.size() == 1) return samples_[0];
    const int m = segments();
    const double pos = std::clamp(s, 0.0, 1.0) * m;
    int i = std::min(static_cast<int>(std::floor(pos)), m - 1);
    const double t = pos - i;
    return (1.0 - t) * samples_[i] + t * samples_[i + 1];
}

Mat MatrixField::slope(double s) const {
    if (samples_.size() == 1) return Mat::Zero(rows(), cols());
    const int m = segments();
    const double pos = std::clamp(s, 0.0, 1.0) * m;
    int i = std::min(static_cast<int>(std::floor(pos + 1e-12)), m - 1);
    return double(m) * (samples_[i + 1] - samples_[i]);
}

Mat HyperbolicSystem::M(int e, double x) const { return coeffs[e].M.at(x / graph.edge(e).length); }
Mat HyperbolicSystem::N(int e, double x) const { return coeffs[e].N.at(x / graph.edge(e).length); }
Mat HyperbolicSystem::Q(int e, double x) const { return coeffs[e].Q.at(x / graph.edge(e).length); }
Mat HyperbolicSystem::QM(int e, double x) const { return Q(e, x) * M(e, x); }

Mat HyperbolicSystem::dQM(int e, double x) const {
    const auto& c = coeffs[e];
    const double len = graph.edge(e).length;
    if (c.dQM) return c.dQM->at(x / len);
    if (c.Q.is_constant() && c.M.is_constant()) return Mat::Zero(c.M.rows(), c.M.cols());
    // Slope of the linear interpolant of Q M on the finer of the two grids.
    const int m = std::max(c.Q.segments(), c.M.segments());
    const double pos = std::clamp(x / len, 0.0, 1.0) * m;
    int i = std::min(static_cast<int>(std::floor(pos + 1e-12)), m - 1);
    const double s0 = double(i) / m, s1 = double(i + 1) / m;
    Mat a = c.Q.at(s0) * c.M.at(s0);
    Mat b = c.Q.at(s1) * c.M.at(s1);
    return (b - a) / ((s1 - s0) * len);
}

std::vector<double> HyperbolicSystem::check_nodes(int e) const {
    const auto& c = coeffs[e];
    int m = std::max({c.M.segments(), c.N.segments(), c.Q.segments(), c.dQM ? c.dQM->segments() : 0});
    std::vector<double> s;
    for (int i = 0; i <= m; ++i) s.push_back(m == 0 ? 0.0 : double(i) / m);
    return s;
}

int HyperbolicSystem::block_of_vertex(int v) const {
    for (int b = 0; b < static_cast<int>(blocks.size()); ++b)
        if (blocks[b].vertex == v) return b;
    return -1;
}

int HyperbolicSystem::total_dd() const {
    int s = 0;
    for (const auto& b : blocks) s += b.dd();
    return s;
}

std::vector<Slot> global_layout(const MetricGraph& g) {
    std::vector<Slot> out;
    int off = 0;
    for (End end : {End::Initial, End::Terminal})
        for (int e = 0; e < g.num_edges(); ++e) {
            out.push_back({e, off, end});
            off += g.edge(e).dim;
        }
    return out;
}

namespace {

int slots_dim(const MetricGraph& g, const std::vector<Slot>& slots) {
    int d = 0;
    for (const auto& s : slots) d += g.edge(s.edge).dim;
    return d;
}

void check_square(const Mat& m, int n, const std::string& what) {
    if (m.rows() != n || m.cols() != n)
        throw Error(ErrorCode::InvalidParameter, what + ": expected " + std::to_string(n) + "x" + std::to_string(n) +
                                                     " matrix, got " + std::to_string(m.rows()) + "x" +
                                                     std::to_string(m.cols()));
}

ConditionBlock build_block(const std::string& name, int vertex, std::vector<Slot> slots, const MetricGraph& g,
                           const ConditionInput& in, const Tolerances& tol, std::vector<std::string>& warnings) {
    ConditionBlock b;
    b.name = name;
    b.vertex = vertex;
    b.slots = std::move(slots);
    b.dim = slots_dim(g, b.slots);
    const int n = b.dim;
    if (in.Y_span) {
        if (in.Y_span->rows() != n)
            throw Error(ErrorCode::InvalidParameter, name + ": Y spanning vectors must have length " + std::to_string(n));
        b.Y = la::orthonormalize_strict(*in.Y_span, tol.rank, name + " Y");
    } else {
        b.Y = Mat::Identity(n, n);
    }
    if (in.Yd_span.cols() > 0 && in.Yd_span.rows() != n)
        throw Error(ErrorCode::InvalidParameter, name + ": Yd spanning vectors must have length " + std::to_string(n));
    b.Yd = in.Yd_span.cols() > 0 ? la::orthonormalize_strict(in.Yd_span, tol.rank, name + " Yd") : Mat(n, 0);

    const Mat Pd = b.Pd();
    const Mat PY = b.PY();
    auto compress = [&](const std::optional<Mat>& m, const Mat& left, const Mat& right, const std::string& what) {
        if (!m) return Mat(Mat::Zero(n, n));
        check_square(*m, n, name + " " + what);
        Mat c = left * (*m) * right;
        if ((c - *m).norm() > tol.sub * std::max(1.0, m->norm()))
            warnings.push_back(name + ": " + what + " compressed onto the admissible subspaces (change " +
                               std::to_string((c - *m).norm()) + ")");
        return c;
    };
    b.B = compress(in.B, Pd, PY, "B");
    b.C = compress(in.C, Pd, Pd, "C");
    if (in.Q) {
        check_square(*in.Q, n, name + " Q");
        b.Q = Pd * (*in.Q) * Pd;
    } else {
        b.Q = Pd;
    }
    return b;
}

}  // namespace

HyperbolicSystem make_system(MetricGraph graph, std::vector<EdgeCoefficients> coeffs, ConditionMode mode,
                             const std::vector<ConditionInput>& inputs, const Tolerances& tol) {
    HyperbolicSystem sys;
    sys.graph = std::move(graph);
    sys.coeffs = std::move(coeffs);
    sys.mode = mode;
    sys.tol = tol;
    const auto& g = sys.graph;
    if (static_cast<int>(sys.coeffs.size()) != g.num_edges())
        throw Error(ErrorCode::InvalidParameter, "coefficients must be given for every edge");
    for (int e = 0; e < g.num_edges(); ++e) {
        const auto& c = sys.coeffs[e];
        const int k = g.edge(e).dim;
        auto chk = [&](const MatrixField& f, const char* nm) {
            if (f.empty() || f.rows() != k || f.cols() != k)
                throw Error(ErrorCode::InvalidParameter,
                            "edge '" + g.edge(e).id + "': " + nm + " must be " + std::to_string(k) + "x" + std::to_string(k));
        };
        chk(c.M, "M");
        chk(c.N, "N");
        chk(c.Q, "Q");
        if (c.dQM) chk(*c.dQM, "dQM");
    }
    if (mode == ConditionMode::Local) {
        if (static_cast<int>(inputs.size()) != g.num_vertices())
            throw Error(ErrorCode::InvalidParameter, "one vertex condition per vertex is required");
        for (int v = 0; v < g.num_vertices(); ++v)
            sys.blocks.push_back(build_block(g.vertex_id(v), v, g.trace_layout(v), g, inputs[v], tol, sys.warnings));
    } else {
        if (inputs.size() != 1) throw Error(ErrorCode::InvalidParameter, "global mode takes exactly one condition");
        sys.blocks.push_back(build_block("global", -1, global_layout(g), g, inputs[0], tol, sys.warnings));
    }
    return sys;
}

namespace {
std::string node_loc(const MetricGraph& g, int e, double s) {
    std::ostringstream os;
    os << "edge '" << g.edge(e).id << "' at x=" << s * g.edge(e).length;
    return os.str();
}
}  // namespace

ValidationReport validate_assumptions(const HyperbolicSystem& sys) {
    ValidationReport rep;
    rep.warnings = sys.warnings;
    const auto& g = sys.graph;
    const auto& tol = sys.tol;
    for (int e = 0; e < g.num_edges(); ++e) {
        double worst_qasym = 0, min_qeig = std::numeric_limits<double>::infinity(), worst_qmasym = 0,
               min_det = std::numeric_limits<double>::infinity();
        double s_qasym = 0, s_qeig = 0, s_qmasym = 0, s_det = 0;
        for (double s : sys.check_nodes(e)) {
            const double x = s * g.edge(e).length;
            Mat Q = sys.Q(e, x), M = sys.M(e, x);
            double a = la::rel_asymmetry(Q);
            if (a >= worst_qasym) { worst_qasym = a; s_qasym = s; }
            double ev = la::herm_eigenvalues(Q)(0);
            if (ev < min_qeig) { min_qeig = ev; s_qeig = s; }
            double b = la::rel_asymmetry(Q * M);
            if (b >= worst_qmasym) { worst_qmasym = b; s_qmasym = s; }
            double d = std::abs(M.determinant());
            if (d < min_det) { min_det = d; s_det = s; }
        }
        rep.checks.push_back({"Q_hermitian", worst_qasym <= tol.sym, worst_qasym, node_loc(g, e, s_qasym)});
        rep.checks.push_back({"Q_positive_definite", min_qeig > tol.eig, min_qeig, node_loc(g, e, s_qeig)});
        rep.checks.push_back({"QM_hermitian", worst_qmasym <= tol.sym, worst_qmasym, node_loc(g, e, s_qmasym)});
        rep.checks.push_back({"M_invertible", min_det > tol.det, min_det, node_loc(g, e, s_det)});
    }
    for (const auto& b : sys.blocks) {
        const std::string loc = b.vertex >= 0 ? "vertex '" + b.name + "'" : "global condition";
        double r = la::subspace_residual(b.Yd, b.Y);
        rep.checks.push_back({"Yd_subspace_of_Y", r <= tol.sub, r, loc});
        double qa = la::rel_asymmetry(b.Q);
        rep.checks.push_back({"vertex_Q_hermitian", qa <= tol.sym, qa, loc});
        double qmin = b.dd() == 0 ? 0.0 : la::herm_eigenvalues(b.Yd.adjoint() * b.Q * b.Yd)(0);
        rep.checks.push_back({"vertex_Q_positive_on_Yd", b.dd() == 0 || qmin > tol.eig, qmin, loc});
    }
    for (const auto& c : rep.checks) rep.ok = rep.ok && c.pass;
    return rep;
}

Mat assemble_T(const HyperbolicSystem& sys, const std::vector<Slot>& slots) {
    int n = 0;
    for (const auto& s : slots) n += sys.graph.edge(s.edge).dim;
    Mat T = Mat::Zero(n, n);
    for (const auto& s : slots) {
        const auto& ed = sys.graph.edge(s.edge);
        const double x = s.end == End::Terminal ? ed.length : 0.0;
        T.block(s.offset, s.offset, ed.dim, ed.dim) = double(iota_sign(s.end)) * sys.QM(s.edge, x);
    }
    return T;
}

Mat assemble_Tv(const HyperbolicSystem& sys, const std::string& vertex) {
    return assemble_T(sys, sys.graph.trace_layout(sys.graph.vertex_index(vertex)));
}

Mat assemble_T_global(const HyperbolicSystem& sys) { return assemble_T(sys, global_layout(sys.graph)); }

}  // namespace hypnet
