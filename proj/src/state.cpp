#include "hypnet/state.hpp"

#include <cmath>
#include <numbers>

#include "hypnet/linalg.hpp"
#include "hypnet/wellposed.hpp"

namespace hypnet {

std::vector<int> uniform_cells(const HyperbolicSystem& sys, int n) {
    return std::vector<int>(sys.graph.num_edges(), n);
}

StateVector zero_state(const HyperbolicSystem& sys, const std::vector<int>& cells) {
    StateVector s;
    for (int e = 0; e < sys.graph.num_edges(); ++e) s.u.push_back(Mat::Zero(sys.graph.edge(e).dim, cells.at(e) + 1));
    s.x = Vec::Zero(sys.total_dd());
    return s;
}

std::vector<int> cells_of(const StateVector& s) {
    std::vector<int> c;
    for (const auto& m : s.u) c.push_back(static_cast<int>(m.cols()) - 1);
    return c;
}

int x_offset(const HyperbolicSystem& sys, int block) {
    int off = 0;
    for (int b = 0; b < block; ++b) off += sys.blocks[b].dd();
    return off;
}

Vec block_trace(const HyperbolicSystem& sys, const std::vector<Mat>& u, int block) {
    const auto& b = sys.blocks[block];
    Vec t(b.dim);
    for (const auto& s : b.slots) {
        const Mat& ue = u[s.edge];
        t.segment(s.offset, ue.rows()) = s.end == End::Initial ? ue.col(0) : ue.col(ue.cols() - 1);
    }
    return t;
}

Mat vertex_gram(const ConditionBlock& b) { return la::herm(b.Yd.adjoint() * b.Q * b.Yd); }

cplx inner_d(const HyperbolicSystem& sys, const StateVector& a, const StateVector& b) {
    cplx s = 0;
    for (int e = 0; e < sys.graph.num_edges(); ++e) {
        const int n = static_cast<int>(a.u[e].cols()) - 1;
        const double len = sys.graph.edge(e).length, h = len / n;
        for (int j = 0; j <= n; ++j) {
            const double w = (j == 0 || j == n) ? 0.5 * h : h;
            s += w * b.u[e].col(j).dot(sys.Q(e, j * h) * a.u[e].col(j));
        }
    }
    for (int bi = 0; bi < static_cast<int>(sys.blocks.size()); ++bi) {
        const auto& blk = sys.blocks[bi];
        if (blk.dd() == 0) continue;
        const int off = x_offset(sys, bi);
        s += b.x.segment(off, blk.dd()).dot(vertex_gram(blk) * a.x.segment(off, blk.dd()));
    }
    return s;
}

double energy(const HyperbolicSystem& sys, const StateVector& s) { return std::max(0.0, inner_d(sys, s, s).real()); }

StateVector operator+(const StateVector& a, const StateVector& b) {
    StateVector r = a;
    for (size_t e = 0; e < r.u.size(); ++e) r.u[e] += b.u[e];
    r.x += b.x;
    return r;
}

StateVector operator-(const StateVector& a, const StateVector& b) { return a + cplx(-1.0) * b; }

StateVector operator*(cplx s, const StateVector& a) {
    StateVector r = a;
    for (auto& m : r.u) m *= s;
    r.x *= s;
    return r;
}

double constraint_residual(const HyperbolicSystem& sys, const StateVector& s) {
    double r = 0;
    for (int bi = 0; bi < static_cast<int>(sys.blocks.size()); ++bi) {
        const auto& b = sys.blocks[bi];
        Vec t = block_trace(sys, s.u, bi);
        r = std::max(r, (t - b.Y * (b.Y.adjoint() * t)).norm());
        if (b.dd() > 0) r = std::max(r, (s.x.segment(x_offset(sys, bi), b.dd()) - b.Yd.adjoint() * t).norm());
    }
    return r;
}

Vec SmoothEdge::value(double x) const {
    const double s = x / length;
    Vec v = (1.0 - s) * left + s * right;
    const double pi = std::numbers::pi;
    for (size_t m = 0; m < bump.size(); ++m) {
        if (power > 0)
            v += std::pow(std::sin(pi * s), power) * std::cos(m * pi * s) * bump[m];
        else
            v += s * (1.0 - s) * std::sin((m + 1) * pi * s) * bump[m];
    }
    return v;
}

Vec SmoothEdge::derivative(double x) const {
    const double s = x / length;
    Vec d = right - left;
    const double pi = std::numbers::pi;
    for (size_t m = 0; m < bump.size(); ++m) {
        if (power > 0) {
            const double sn = std::sin(pi * s), cs = std::cos(pi * s), km = m * pi;
            d += (power * std::pow(sn, power - 1) * pi * cs * std::cos(km * s) - std::pow(sn, power) * km * std::sin(km * s)) *
                 bump[m];
            continue;
        }
        const double k = (m + 1) * pi;
        d += ((1.0 - 2.0 * s) * std::sin(k * s) + s * (1.0 - s) * k * std::cos(k * s)) * bump[m];
    }
    return d / length;
}

StateVector SmoothState::sample(const std::vector<int>& cells) const {
    StateVector st;
    for (size_t e = 0; e < edges.size(); ++e) {
        const int n = cells.at(e);
        Mat m(edges[e].left.size(), n + 1);
        for (int j = 0; j <= n; ++j) m.col(j) = edges[e].value(edges[e].length * j / n);
        // Pin the endpoints exactly; value() reproduces them only up to roundoff in s.
        m.col(0) = edges[e].left;
        m.col(n) = edges[e].right;
        st.u.push_back(m);
    }
    st.x = x;
    return st;
}

std::vector<Mat> SmoothState::sample_derivative(const std::vector<int>& cells) const {
    std::vector<Mat> out;
    for (size_t e = 0; e < edges.size(); ++e) {
        const int n = cells.at(e);
        Mat m(edges[e].left.size(), n + 1);
        for (int j = 0; j <= n; ++j) m.col(j) = edges[e].derivative(edges[e].length * j / n);
        out.push_back(m);
    }
    return out;
}

namespace {
Vec random_vec(std::mt19937_64& rng, int n, bool real) {
    Mat m = la::random_matrix(rng, n, 1);
    if (real) m = m.real().cast<cplx>();
    return m.col(0);
}
}  // namespace

SmoothState smooth_from_traces(const HyperbolicSystem& sys, const std::vector<Vec>& traces, const Vec& x,
                               std::mt19937_64& rng, int modes) {
    SmoothState st;
    const auto& g = sys.graph;
    bool real = true;
    for (const auto& t : traces) real = real && t.imag().norm() == 0.0;
    for (int e = 0; e < g.num_edges(); ++e) {
        SmoothEdge se;
        se.length = g.edge(e).length;
        se.left = Vec::Zero(g.edge(e).dim);
        se.right = Vec::Zero(g.edge(e).dim);
        for (int m = 0; m < modes; ++m) se.bump.push_back(random_vec(rng, g.edge(e).dim, real) / double(m + 1));
        st.edges.push_back(se);
    }
    for (int bi = 0; bi < static_cast<int>(sys.blocks.size()); ++bi)
        for (const auto& s : sys.blocks[bi].slots) {
            const int d = g.edge(s.edge).dim;
            (s.end == End::Initial ? st.edges[s.edge].left : st.edges[s.edge].right) = traces[bi].segment(s.offset, d);
        }
    st.x = x;
    return st;
}

SmoothState random_domain_state(const HyperbolicSystem& sys, std::mt19937_64& rng, bool real) {
    std::vector<Vec> traces;
    Vec x(sys.total_dd());
    for (int bi = 0; bi < static_cast<int>(sys.blocks.size()); ++bi) {
        const auto& b = sys.blocks[bi];
        Vec t = b.Y * random_vec(rng, static_cast<int>(b.Y.cols()), false);
        if (real) {
            // A real subspace contains the real part of each of its elements.
            Vec re = t.real().cast<cplx>();
            t = (re - b.Y * (b.Y.adjoint() * re)).norm() <= 1e-12 * std::max(1.0, re.norm()) ? re : t;
        }
        traces.push_back(t);
        if (b.dd() > 0) x.segment(x_offset(sys, bi), b.dd()) = b.Yd.adjoint() * t;
    }
    return smooth_from_traces(sys, traces, x, rng);
}

SmoothState random_adjoint_state(const HyperbolicSystem& sys, std::mt19937_64& rng) {
    std::vector<Vec> traces;
    Vec x(sys.total_dd());
    for (int bi = 0; bi < static_cast<int>(sys.blocks.size()); ++bi) {
        const auto& b = sys.blocks[bi];
        Mat S = adjoint_space(sys, bi);
        Vec z = S * random_vec(rng, static_cast<int>(S.cols()), false);
        traces.push_back(z.head(b.dim));
        if (b.dd() > 0) x.segment(x_offset(sys, bi), b.dd()) = z.tail(b.dd());
    }
    return smooth_from_traces(sys, traces, x, rng);
}

}  // namespace hypnet
