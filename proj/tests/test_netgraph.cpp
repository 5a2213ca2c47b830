#include <doctest.h>

#include <random>

#include "hypnet/linalg.hpp"
#include "hypnet/netgraph.hpp"

using namespace hypnet;

namespace {

GraphSpec path3() {
    GraphSpec gs;
    gs.vertices = {"a", "b", "c"};
    gs.edges = {{"e1", "a", "b", 1.0, 2}, {"e2", "b", "c", 0.5, 1}};
    return gs;
}

ErrorCode code_of(const GraphSpec& gs) {
    try {
        MetricGraph::build(gs);
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Ok;
}

// Random connected-ish graph without self-loops.
GraphSpec random_graph(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nv_pick(2, 8), dim_pick(1, 3);
    std::uniform_real_distribution<double> len(0.1, 3.0);
    const int nv = nv_pick(rng);
    std::uniform_int_distribution<int> ne_pick(1, 14), vpick(0, nv - 1);
    GraphSpec gs;
    for (int v = 0; v < nv; ++v) gs.vertices.push_back("v" + std::to_string(v));
    const int ne = ne_pick(rng);
    for (int e = 0; e < ne; ++e) {
        int t = vpick(rng), h = vpick(rng);
        while (h == t) h = vpick(rng);
        gs.edges.push_back({"e" + std::to_string(e), gs.vertices[t], gs.vertices[h], len(rng), dim_pick(rng)});
    }
    return gs;
}

}  // namespace

TEST_CASE("graph dimensions and trace layout") {
    MetricGraph g = MetricGraph::build(path3());
    CHECK(g.num_vertices() == 3);
    CHECK(g.num_edges() == 2);
    CHECK(g.k() == 3);
    CHECK(g.kv(0) == 2);
    CHECK(g.kv(1) == 3);
    CHECK(g.kv(2) == 1);
    CHECK(g.edge_offset(1) == 2);

    auto slots = g.trace_layout("b");
    REQUIRE(slots.size() == 2);
    CHECK(slots[0].edge == 0);
    CHECK(slots[0].end == End::Terminal);
    CHECK(slots[0].offset == 0);
    CHECK(slots[1].edge == 1);
    CHECK(slots[1].end == End::Initial);
    CHECK(slots[1].offset == 2);
    CHECK(iota_sign(End::Terminal) == 1);
    CHECK(iota_sign(End::Initial) == -1);
}

TEST_CASE("incidence matrices") {
    MetricGraph g = MetricGraph::build(path3());
    IncidenceMatrices inc = incidence(g);
    Eigen::MatrixXi plus(3, 2), minus(3, 2);
    plus << 0, 0, 1, 0, 0, 1;
    minus << 1, 0, 0, 1, 0, 0;
    CHECK(inc.plus == plus);
    CHECK(inc.minus == minus);
    // every edge has one head and one tail
    Eigen::MatrixXi s = inc.signed_();
    for (int e = 0; e < 2; ++e) CHECK(s.col(e).sum() == 0);
}

TEST_CASE("graph construction errors") {
    GraphSpec gs = path3();
    gs.edges[0].length = 0.0;
    CHECK(code_of(gs) == ErrorCode::NonPositiveLength);
    gs = path3();
    gs.edges[1].head = "b";
    CHECK(code_of(gs) == ErrorCode::SelfLoop);
    gs = path3();
    gs.edges[1].head = "zz";
    CHECK(code_of(gs) == ErrorCode::DanglingEndpoint);
    gs = path3();
    gs.edges[0].dim = 0;
    CHECK(code_of(gs) == ErrorCode::ZeroFiberDimension);
    MetricGraph g = MetricGraph::build(path3());
    CHECK_THROWS_AS(g.vertex_index("nope"), Error);
}

TEST_CASE("spec round trip") {
    MetricGraph g = MetricGraph::build(path3());
    MetricGraph h = MetricGraph::build(g.spec());
    CHECK(h.k() == g.k());
    CHECK(h.vertices() == g.vertices());
    CHECK(h.edge(1).length == g.edge(1).length);
}

TEST_CASE("handshake identity on random graphs") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        MetricGraph g = MetricGraph::build(random_graph(rng));
        int sum = 0;
        for (int v = 0; v < g.num_vertices(); ++v) {
            sum += g.kv(v);
            int layout = 0;
            for (const auto& s : g.trace_layout(v)) layout += g.edge(s.edge).dim;
            CHECK(layout == g.kv(v));
        }
        CHECK(sum == 2 * g.k());
    }
}

TEST_CASE("subspace toolkit") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        Mat a = la::random_matrix(rng, 6, 3) * la::random_matrix(rng, 3, 5);  // rank 3
        CHECK(la::rank(a, 1e-10) == 3);
        Mat o = la::orth(a, 1e-10);
        Mat n = la::null_space(a, 1e-10);
        CHECK(o.cols() == 3);
        CHECK(n.cols() == 2);
        CHECK((o.adjoint() * o - Mat::Identity(3, 3)).norm() < 1e-12);
        CHECK((a * n).norm() < 1e-10 * a.norm());
        Mat c = la::complement(o, 6);
        CHECK(c.cols() == 3);
        CHECK((o.adjoint() * c).norm() < 1e-12);
        CHECK(la::subspace_residual(la::orth(a.col(0), 1e-12), o) < 1e-12);
        CHECK(la::subspace_distance(o, la::orth(a * la::random_matrix(rng, 5, 5), 1e-10)) < 1e-10);
        CHECK(la::subspace_distance(o, c) > 0.5);
    }
    Mat dep(3, 2);
    dep << 1, 2, 1, 2, 0, 0;
    CHECK_THROWS_AS(la::orthonormalize_strict(dep, 1e-10, "Y"), Error);
}

TEST_CASE("hermitian helpers") {
    std::mt19937_64 rng(5);
    Mat a = la::random_matrix(rng, 4, 4);
    Mat p = a * a.adjoint();
    Mat r = la::psd_sqrt(p);
    CHECK((r * r - p).norm() < 1e-10 * p.norm());
    CHECK(la::rel_asymmetry(la::herm(a)) < 1e-15);
    RVec ev = la::herm_eigenvalues(p);
    for (int i = 1; i < ev.size(); ++i) CHECK(ev(i) >= ev(i - 1));
    CHECK(ev(0) > 0);
}
