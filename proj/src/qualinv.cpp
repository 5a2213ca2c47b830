#include "hypnet/qualinv.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <atomic>
#include <future>
#include <numbers>
#include <thread>
#include <sstream>
#include <unsupported/Eigen/MatrixFunctions>

#include "hypnet/evolve.hpp"
#include "hypnet/linalg.hpp"

namespace hypnet {

const char* property_name(Property p) {
    switch (p) {
        case Property::Real: return "real";
        case Property::Positive: return "positive";
        case Property::Linf: return "linf_contractive";
    }
    return "?";
}

Property parse_property(const std::string& s) {
    if (s == "real") return Property::Real;
    if (s == "positive") return Property::Positive;
    if (s == "linf" || s == "linf_contractive") return Property::Linf;
    throw Error(ErrorCode::InvalidParameter, "unknown property '" + s + "' (expected real, positive or linf)");
}

namespace {

// Ambient vertex weight, extended by the identity off Yd so that it is invertible.
Mat ambient_weight(const ConditionBlock& b) {
    Mat P = b.Pd();
    return la::herm(P * b.Q * P) + (Mat::Identity(b.dim, b.dim) - P);
}

cplx clamp_unit(cplx z) { return std::abs(z) > 1.0 ? z / std::abs(z) : z; }

Vec apply_set(const Vec& v, const Mat& Q, ConvexSet set) {
    Vec r(v.size());
    switch (set) {
        case ConvexSet::Reals: {
            RMat Qr = Q.real();
            RVec rhs = (Q * v).real();
            r = Qr.ldlt().solve(rhs).cast<cplx>();
            break;
        }
        case ConvexSet::Nonneg:
            for (int i = 0; i < v.size(); ++i) r(i) = std::max(v(i).real(), 0.0);
            break;
        case ConvexSet::UnitBall:
            for (int i = 0; i < v.size(); ++i) r(i) = clamp_unit(v(i));
            break;
    }
    return r;
}

bool is_real_diagonal(const Mat& Q, double tol) { return la::rel_offdiag(Q) <= tol && la::rel_imag(Q) <= tol; }
bool is_identity(const Mat& Q, double tol) {
    return (Q - Mat::Identity(Q.rows(), Q.cols())).norm() <= tol * std::max<double>(1.0, Q.rows());
}

// Real vectors inside span(Y): kernel of the stacked real and imaginary parts of I - P_Y.
RMat real_part_basis(const Mat& Y) {
    const int n = static_cast<int>(Y.rows());
    Mat R = Mat::Identity(n, n) - Y * Y.adjoint();
    RMat S(2 * n, n);
    S << R.real(), R.imag();
    Eigen::JacobiSVD<RMat> svd(S, Eigen::ComputeFullV);
    const RVec& sv = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i) rank += sv(i) > 1e-9 ? 1 : 0;
    return svd.matrixV().rightCols(n - rank);
}

double off_span(const Mat& Y, const Vec& v) { return (v - Y * (Y.adjoint() * v)).norm(); }

QualCondition named(std::string name) {
    QualCondition c;
    c.name = std::move(name);
    return c;
}

void add(QualReport& r, QualCondition c) {
    if (!c.pass) r.failed_conditions.push_back(c.name);
    r.conditions.push_back(std::move(c));
}

void finish(QualReport& r) {
    r.certified = r.failed_conditions.empty();
    bool sampled = false;
    for (const auto& c : r.conditions) sampled = sampled || c.sampled;
    if (r.certified && sampled) r.notes.push_back("certified (sampled): cone invariance was checked on random samples");
}

template <class F>
double worst_over_nodes(const HyperbolicSystem& sys, F f, std::string* where) {
    double w = 0;
    for (int e = 0; e < sys.graph.num_edges(); ++e)
        for (double s : sys.check_nodes(e)) {
            const double v = f(e, s * sys.graph.edge(e).length);
            if (v > w) {
                w = v;
                if (where) *where = "edge '" + sys.graph.edge(e).id + "'";
            }
        }
    return w;
}

template <class F>
double worst_over_blocks(const HyperbolicSystem& sys, F f, std::string* where) {
    double w = 0;
    for (const auto& b : sys.blocks) {
        const double v = f(b);
        if (v > w) {
            w = v;
            if (where) *where = b.name;
        }
    }
    return w;
}

QualCondition edge_condition(const HyperbolicSystem& sys, const std::string& name, double tol,
                             const std::function<double(int, double)>& f) {
    QualCondition c = named(name);
    std::string where;
    c.value = worst_over_nodes(sys, f, &where);
    c.pass = c.value <= tol;
    if (!c.pass) c.detail = "fails at " + where;
    return c;
}

QualCondition block_condition(const HyperbolicSystem& sys, const std::string& name, double tol,
                              const std::function<double(const ConditionBlock&)>& f) {
    QualCondition c = named(name);
    std::string where;
    c.value = worst_over_blocks(sys, f, &where);
    c.pass = c.value <= tol;
    if (!c.pass) c.detail = "fails at " + where;
    return c;
}

// Sampled invariance of span(Y) under a componentwise map; returns the worst relative residual.
double sampled_invariance(const Mat& Y, int samples, std::mt19937_64& rng, bool real_samples,
                          const std::function<Vec(const Vec&)>& map, std::string* why) {
    if (Y.cols() == 0) return 0.0;
    RMat Rb;
    if (real_samples) {
        Rb = real_part_basis(Y);
        if (Rb.cols() < Y.cols()) {
            if (why) *why = "subspace is not spanned by real vectors";
            return 1.0;
        }
    }
    std::uniform_real_distribution<double> scale(0.2, 3.0);
    double worst = 0;
    for (int i = 0; i < samples; ++i) {
        Vec xi;
        if (real_samples) {
            RMat c = la::random_matrix(rng, static_cast<int>(Rb.cols()), 1).real();
            xi = (Rb * c).cast<cplx>();
        } else {
            xi = Y * la::random_matrix(rng, static_cast<int>(Y.cols()), 1);
        }
        const double m = xi.cwiseAbs().maxCoeff();
        if (m == 0) continue;
        xi *= scale(rng) / m;
        worst = std::max(worst, off_span(Y, map(xi)) / std::max(1.0, xi.norm()));
    }
    return worst;
}

Vec positive_part(const Vec& v) { return apply_set(v, Mat(), ConvexSet::Nonneg); }
Vec unit_clamp(const Vec& v) { return apply_set(v, Mat(), ConvexSet::UnitBall); }

double metzler_violation(const Mat& A) {
    double w = la::rel_imag(A) > 0 ? A.imag().cwiseAbs().maxCoeff() : 0.0;
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j)
            if (i != j) w = std::max(w, -A(i, j).real());
    return w;
}

// max_i (Re a_ii + sum_{j != i} |a_ij|), must be <= 0 for an infinity-contractive semigroup.
double row_dominance_excess(const Mat& A) {
    double w = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < A.rows(); ++i) {
        double s = A(i, i).real();
        for (int j = 0; j < A.cols(); ++j)
            if (j != i) s += std::abs(A(i, j));
        w = std::max(w, s);
    }
    return A.rows() == 0 ? 0.0 : w;
}

double inf_norm(const Mat& A) { return A.rows() == 0 ? 0.0 : A.cwiseAbs().rowwise().sum().maxCoeff(); }

}  // namespace

StateVector minimizing_projector(const HyperbolicSystem& sys, const StateVector& s, ConvexSet set) {
    const double tol = sys.tol.sym;
    StateVector out = s;
    for (int e = 0; e < sys.graph.num_edges(); ++e) {
        const int n = static_cast<int>(s.u[e].cols()) - 1;
        const double h = sys.graph.edge(e).length / n;
        for (int j = 0; j <= n; ++j) {
            Mat Q = sys.Q(e, j * h);
            if (set == ConvexSet::Nonneg && !is_real_diagonal(Q, tol))
                throw Error(ErrorCode::WeightNotDiagonal, "edge '" + sys.graph.edge(e).id + "': Q is not real diagonal");
            if (set == ConvexSet::UnitBall && !is_identity(Q, tol))
                throw Error(ErrorCode::WeightNotIdentity, "edge '" + sys.graph.edge(e).id + "': Q is not the identity");
            out.u[e].col(j) = apply_set(s.u[e].col(j), Q, set);
        }
    }
    for (int bi = 0; bi < static_cast<int>(sys.blocks.size()); ++bi) {
        const auto& b = sys.blocks[bi];
        if (b.dd() == 0) continue;
        Mat Qa = ambient_weight(b);
        if (set == ConvexSet::Nonneg && !is_real_diagonal(Qa, tol))
            throw Error(ErrorCode::WeightNotDiagonal, b.name + ": vertex weight is not real diagonal");
        if (set == ConvexSet::UnitBall && !is_identity(vertex_gram(b), tol))
            throw Error(ErrorCode::WeightNotIdentity, b.name + ": vertex weight is not the identity");
        const int off = x_offset(sys, bi);
        Vec y = b.Yd * s.x.segment(off, b.dd());
        out.x.segment(off, b.dd()) = b.Yd.adjoint() * apply_set(y, Qa, set);
    }
    return out;
}

namespace {

void real_conditions(const HyperbolicSystem& sys, QualReport& r) {
    const double tol = sys.tol.sym, sub = sys.tol.sub;
    auto conj_res = [](const Mat& Y) { return Y.cols() == 0 ? 0.0 : la::subspace_residual(Mat(Y.conjugate()), Y); };
    add(r, block_condition(sys, "Y_real", sub, [&](const ConditionBlock& b) { return conj_res(b.Y); }));
    add(r, block_condition(sys, "Yd_real", sub, [&](const ConditionBlock& b) { return conj_res(b.Yd); }));
    add(r, edge_condition(sys, "M_real", tol, [&](int e, double x) { return la::rel_imag(sys.M(e, x)); }));
    add(r, edge_condition(sys, "N_real", tol, [&](int e, double x) { return la::rel_imag(sys.N(e, x)); }));
    add(r, edge_condition(sys, "Q_real", tol, [&](int e, double x) { return la::rel_imag(sys.Q(e, x)); }));
    add(r, block_condition(sys, "B_real", tol, [&](const ConditionBlock& b) { return la::rel_imag(b.B); }));
    add(r, block_condition(sys, "C_real", tol, [&](const ConditionBlock& b) { return la::rel_imag(b.C); }));
    add(r, block_condition(sys, "Q_vertex_real", tol,
                           [&](const ConditionBlock& b) { return la::rel_imag(b.Pd() * b.Q * b.Pd()); }));
}

}  // namespace

QualReport check_real(const HyperbolicSystem& sys) {
    QualReport r;
    r.property = Property::Real;
    real_conditions(sys, r);
    finish(r);
    return r;
}

QualReport check_positive(const HyperbolicSystem& sys, int samples, unsigned long long seed) {
    QualReport r;
    r.property = Property::Positive;
    const double tol = sys.tol.sym, sub = sys.tol.sub;
    {
        QualReport rr = check_real(sys);
        QualCondition c = named("data_real");
        c.pass = rr.certified;
        if (!c.pass) {
            std::ostringstream os;
            for (size_t i = 0; i < rr.failed_conditions.size(); ++i) os << (i ? ", " : "") << rr.failed_conditions[i];
            c.detail = "reality conditions fail: " + os.str();
        }
        add(r, c);
    }
    add(r, edge_condition(sys, "M_diagonal", tol, [&](int e, double x) { return la::rel_offdiag(sys.M(e, x)); }));
    add(r, edge_condition(sys, "Q_diagonal", tol, [&](int e, double x) { return la::rel_offdiag(sys.Q(e, x)); }));
    add(r, block_condition(sys, "Q_vertex_diagonal", tol,
                           [&](const ConditionBlock& b) { return la::rel_offdiag(b.Pd() * b.Q * b.Pd()); }));
    add(r, edge_condition(sys, "N_metzler", tol, [&](int e, double x) { return metzler_violation(sys.N(e, x)); }));

    std::mt19937_64 rng(seed);
    QualCondition comm = named("positive_part_commutes_with_Pd");
    comm.sampled = true;
    for (const auto& b : sys.blocks) {
        if (b.dd() == 0) continue;
        Mat P = b.Pd();
        for (int i = 0; i < samples; ++i) {
            Vec xi = la::random_matrix(rng, b.dim, 1).real().cast<cplx>();
            const double d = (P * positive_part(xi) - positive_part(P * xi)).norm() / std::max(1.0, xi.norm());
            if (d > comm.value) {
                comm.value = d;
                comm.detail = "fails at " + b.name;
            }
        }
    }
    comm.pass = comm.value <= sub;
    if (comm.pass) comm.detail.clear();
    add(r, comm);

    for (const char* which : {"Y", "Yd"}) {
        QualCondition c = named(std::string(which) + "_positive_invariant");
        c.sampled = true;
        for (const auto& b : sys.blocks) {
            std::string why;
            const Mat& S = std::string(which) == "Y" ? b.Y : b.Yd;
            const double w = sampled_invariance(S, samples, rng, true, positive_part, &why);
            if (w > c.value) {
                c.value = w;
                c.detail = "fails at " + b.name + (why.empty() ? "" : ": " + why);
            }
        }
        c.pass = c.value <= sub;
        if (c.pass) c.detail.clear();
        add(r, c);
    }
    add(r, block_condition(sys, "vertex_metzler", tol, [&](const ConditionBlock& b) {
        Mat P = b.Pd();
        return metzler_violation(P * b.Q * P * (b.B + b.C * P));
    }));
    finish(r);
    r.notes.push_back("commutation of the positive part with Pd is tested as equality of both compositions on samples");
    return r;
}

QualReport check_linf(const HyperbolicSystem& sys, int samples, unsigned long long seed) {
    QualReport r;
    r.property = Property::Linf;
    const double tol = sys.tol.sym, sub = sys.tol.sub;
    add(r, edge_condition(sys, "Q_identity", tol, [&](int e, double x) {
        Mat Q = sys.Q(e, x);
        return (Q - Mat::Identity(Q.rows(), Q.cols())).norm();
    }));
    add(r, block_condition(sys, "Q_vertex_identity", tol, [&](const ConditionBlock& b) {
        Mat G = vertex_gram(b);
        return (G - Mat::Identity(G.rows(), G.cols())).norm();
    }));
    add(r, edge_condition(sys, "M_diagonal", tol, [&](int e, double x) { return la::rel_offdiag(sys.M(e, x)); }));
    add(r, edge_condition(sys, "N_row_dominant", tol,
                          [&](int e, double x) { return std::max(0.0, row_dominance_excess(sys.N(e, x))); }));
    std::mt19937_64 rng(seed);
    for (const char* which : {"Y", "Yd"}) {
        QualCondition c = named(std::string(which) + "_clamp_invariant");
        c.sampled = true;
        for (const auto& b : sys.blocks) {
            const Mat& S = std::string(which) == "Y" ? b.Y : b.Yd;
            const double w = sampled_invariance(S, samples, rng, false, unit_clamp, nullptr);
            if (w > c.value) {
                c.value = w;
                c.detail = "fails at " + b.name;
            }
        }
        c.pass = c.value <= sub;
        if (c.pass) c.detail.clear();
        add(r, c);
    }
    add(r, block_condition(sys, "vertex_linf_contractive", tol, [&](const ConditionBlock& b) {
        Mat P = b.Pd();
        if (b.dd() == 0) return 0.0;
        if (b.B.norm() <= tol) return std::max(0.0, row_dominance_excess(P * b.C * P));
        return std::max(0.0, inf_norm(b.B + b.C * P) - 1.0);
    }));
    finish(r);
    return r;
}

QualReport check_property(const HyperbolicSystem& sys, Property p, unsigned long long seed) {
    switch (p) {
        case Property::Real: return check_real(sys);
        case Property::Positive: return check_positive(sys, 1000, seed);
        case Property::Linf: return check_linf(sys, 1000, seed);
    }
    return {};
}

namespace {

double excursion(const HyperbolicSystem& sys, const StateVector& s, Property p) {
    auto measure = [p](cplx z) {
        switch (p) {
            case Property::Real: return std::abs(z.imag());
            case Property::Positive: return -z.real();
            case Property::Linf: return std::abs(z) - 1.0;
        }
        return 0.0;
    };
    double w = -std::numeric_limits<double>::infinity();
    for (const auto& u : s.u)
        for (int j = 0; j < u.cols(); ++j)
            for (int i = 0; i < u.rows(); ++i) w = std::max(w, measure(u(i, j)));
    for (int bi = 0; bi < static_cast<int>(sys.blocks.size()); ++bi) {
        const auto& b = sys.blocks[bi];
        if (b.dd() == 0) continue;
        Vec y = b.Yd * s.x.segment(x_offset(sys, bi), b.dd());
        for (int i = 0; i < y.size(); ++i) w = std::max(w, measure(y(i)));
    }
    return w;
}

// Positivity and clamp probes start from interior bumps sin^4(pi s) with zero traces: they lie in the
// domain of A^3, so the grid error stays second order and the coarse/fine difference tracks it.
SmoothState sample_initial(const HyperbolicSystem& sys, Property p, std::mt19937_64& rng) {
    if (p == Property::Real) return random_domain_state(sys, rng, true);
    SmoothState st;
    const auto& g = sys.graph;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int e = 0; e < g.num_edges(); ++e) {
        const int k = g.edge(e).dim;
        SmoothEdge se;
        se.length = g.edge(e).length;
        se.left = Vec::Zero(k);
        se.right = Vec::Zero(k);
        se.power = 4;
        Vec b(k);
        for (int i = 0; i < k; ++i) {
            const double a = 0.9 * unit(rng);
            b(i) = p == Property::Positive ? cplx(a) : std::polar(a, 2 * std::numbers::pi * unit(rng));
        }
        se.bump.push_back(b);
        st.edges.push_back(se);
    }
    st.x = Vec::Zero(sys.total_dd());
    return st;
}

struct Grid {
    DiscreteGenerator gen;
    Mat step;
};

std::vector<StateVector> trajectory(const HyperbolicSystem& sys, const Grid& g, const SmoothState& init, int outputs) {
    Vec r = g.gen.reduce(init.sample(g.gen.cells));
    std::vector<StateVector> out{g.gen.expand(r, sys)};
    for (int i = 1; i <= outputs; ++i) {
        r = g.step * r;
        out.push_back(g.gen.expand(r, sys));
    }
    return out;
}

// Max componentwise distance between a coarse state and a fine state with twice the cells, on shared nodes.
double grid_difference(const HyperbolicSystem& sys, const StateVector& coarse, const StateVector& fine) {
    double d = 0;
    for (size_t e = 0; e < coarse.u.size(); ++e)
        for (int j = 0; j < coarse.u[e].cols(); ++j)
            d = std::max(d, (coarse.u[e].col(j) - fine.u[e].col(2 * j)).cwiseAbs().maxCoeff());
    for (int bi = 0; bi < static_cast<int>(sys.blocks.size()); ++bi) {
        const auto& b = sys.blocks[bi];
        if (b.dd() == 0) continue;
        const int off = x_offset(sys, bi);
        d = std::max(d, (b.Yd * (coarse.x - fine.x).segment(off, b.dd())).cwiseAbs().maxCoeff());
    }
    return d;
}

}  // namespace

DynamicVerdict dynamic_probe(const HyperbolicSystem& sys, Property p, const ProbeOptions& opt) {
    if (opt.trials < 1 || opt.outputs < 1 || opt.cells < 4)
        throw Error(ErrorCode::InvalidParameter, "probe needs trials >= 1, outputs >= 1 and at least 4 cells");
    const double dt = opt.t_final / opt.outputs;
    auto make_grid = [&](int n) {
        Grid g{assemble_discrete_generator(sys, uniform_cells(sys, n)), Mat()};
        if (g.gen.reduced_dim > 4000)
            throw Error(ErrorCode::DimensionTooLargeForExpm, "probe grid too large for the dense exponential");
        g.step = (Mat(g.gen.A) * cplx(dt)).exp();
        return g;
    };
    const Grid coarse = make_grid(opt.cells), fine = make_grid(2 * opt.cells);

    struct TrialResult {
        double corrected = -std::numeric_limits<double>::infinity();
        double raw = -std::numeric_limits<double>::infinity();
        double t = 0;
    };
    auto run_trial = [&](int i) {
        std::mt19937_64 rng(opt.seed * 1000003ULL + static_cast<unsigned long long>(i));
        SmoothState init = sample_initial(sys, p, rng);
        std::vector<StateVector> sc = trajectory(sys, coarse, init, opt.outputs);
        std::vector<StateVector> sf = trajectory(sys, fine, init, opt.outputs);
        TrialResult tr;
        for (size_t j = 0; j < sf.size(); ++j) {
            // The excursion is 1-Lipschitz in the state, so the grid difference bounds its error.
            const double ef = excursion(sys, sf[j], p);
            const double c = ef - grid_difference(sys, sc[j], sf[j]);
            tr.raw = std::max(tr.raw, ef);
            if (c > tr.corrected) {
                tr.corrected = c;
                tr.t = j * dt;
            }
        }
        return tr;
    };
    std::vector<TrialResult> results(opt.trials);
    std::atomic<int> next{0};
    const int workers = std::clamp(static_cast<int>(std::thread::hardware_concurrency()), 1, opt.trials);
    std::vector<std::future<void>> jobs;
    for (int w = 0; w < workers; ++w)
        jobs.push_back(std::async(std::launch::async, [&] {
            for (int i = next++; i < opt.trials; i = next++) results[i] = run_trial(i);
        }));
    for (auto& j : jobs) j.get();

    DynamicVerdict v;
    v.trials = opt.trials;
    v.cells = 2 * opt.cells;
    v.magnitude = -std::numeric_limits<double>::infinity();
    v.raw_excursion = -std::numeric_limits<double>::infinity();
    for (const auto& tr : results) {
        v.raw_excursion = std::max(v.raw_excursion, tr.raw);
        if (tr.corrected > v.magnitude) {
            v.magnitude = tr.corrected;
            v.t = tr.t;
        }
    }
    v.violated = v.magnitude > opt.threshold;
    v.min_value = -v.magnitude;
    return v;
}

}  // namespace hypnet
