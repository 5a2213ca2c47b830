#include <doctest.h>

#include "hypnet/state.hpp"
#include "support.hpp"

using namespace hypnet;

namespace {

// One scalar edge a -> b with u_t + u_x = 0 style data.
HyperbolicSystem scalar_edge(const Mat& M, std::optional<Mat> Ya = {}, std::optional<Mat> Yb = {}) {
    GraphSpec gs;
    gs.vertices = {"a", "b"};
    gs.edges = {{"e", "a", "b", 2.0, 1}};
    EdgeCoefficients c;
    c.M = MatrixField(M);
    c.N = MatrixField(Mat::Zero(1, 1));
    c.Q = MatrixField(Mat::Identity(1, 1));
    ConditionInput a, b;
    a.Y_span = Ya;
    a.Yd_span = Mat::Zero(1, 0);
    b.Y_span = Yb;
    b.Yd_span = Mat::Zero(1, 0);
    return make_system(MetricGraph::build(gs), {c}, ConditionMode::Local, {a, b});
}

const AssumptionCheck* find_check(const ValidationReport& r, const std::string& name) {
    for (const auto& c : r.checks)
        if (c.name == name && !c.pass) return &c;
    return nullptr;
}

}  // namespace

TEST_CASE("matrix field interpolation") {
    Mat a = Mat::Identity(2, 2), b = 3.0 * Mat::Identity(2, 2);
    MatrixField f(std::vector<Mat>{a, b});
    CHECK_FALSE(f.is_constant());
    CHECK(f.segments() == 1);
    CHECK((f.at(0.25) - 1.5 * Mat::Identity(2, 2)).norm() < 1e-15);
    CHECK((f.slope(0.5) - 2.0 * Mat::Identity(2, 2)).norm() < 1e-15);
    MatrixField c(a);
    CHECK(c.is_constant());
    CHECK(c.slope(0.3).norm() == 0.0);
    CHECK_THROWS_AS(MatrixField(std::vector<Mat>{a, Mat::Identity(3, 3)}), Error);
}

TEST_CASE("blocks are orthonormal and nested") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        HyperbolicSystem sys = testsupport::random_basis_system(rng);
        CHECK(validate_assumptions(sys).ok);
        int dd = 0;
        for (const auto& b : sys.blocks) {
            const int ny = static_cast<int>(b.Y.cols());
            CHECK((b.Y.adjoint() * b.Y - Mat::Identity(ny, ny)).norm() < 1e-12);
            CHECK(la::subspace_residual(b.Yd, b.Y) < 1e-12);
            CHECK(b.dim == sys.graph.kv(b.vertex));
            dd += b.dd();
        }
        CHECK(sys.total_dd() == dd);
    }
}

TEST_CASE("assumption report names the failing edge position") {
    HyperbolicSystem sys = scalar_edge(Mat::Zero(1, 1));
    ValidationReport r = validate_assumptions(sys);
    CHECK_FALSE(r.ok);
    const AssumptionCheck* c = find_check(r, "M_invertible");
    REQUIRE(c != nullptr);
    CHECK(c->location.find("edge 'e'") != std::string::npos);
    CHECK(c->location.find("x=") != std::string::npos);
}

TEST_CASE("sampled coefficients are checked at every node") {
    GraphSpec gs;
    gs.vertices = {"a", "b"};
    gs.edges = {{"e", "a", "b", 1.0, 1}};
    EdgeCoefficients c;
    c.M = MatrixField(std::vector<Mat>{Mat::Constant(1, 1, 1.0), Mat::Constant(1, 1, 1.0), Mat::Constant(1, 1, 0.0)});
    c.N = MatrixField(Mat::Zero(1, 1));
    c.Q = MatrixField(Mat::Identity(1, 1));
    ConditionInput in;
    in.Yd_span = Mat::Zero(1, 0);
    HyperbolicSystem sys = make_system(MetricGraph::build(gs), {c}, ConditionMode::Local, {in, in});
    const AssumptionCheck* bad = find_check(validate_assumptions(sys), "M_invertible");
    REQUIRE(bad != nullptr);
    CHECK(bad->location.find("x=1") != std::string::npos);
}

TEST_CASE("rank deficient spanning vectors are rejected") {
    Mat Y(1, 2);
    Y << 1, 2;
    CHECK_THROWS_AS(scalar_edge(Mat::Identity(1, 1), Y), Error);
    try {
        scalar_edge(Mat::Identity(1, 1), Y);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::RankDeficientInput);
    }
}

TEST_CASE("boundary matrix signs follow the endpoint") {
    HyperbolicSystem sys = scalar_edge(Mat::Constant(1, 1, 3.0));
    Mat Ta = assemble_Tv(sys, "a"), Tb = assemble_Tv(sys, "b");
    CHECK(Ta(0, 0).real() == doctest::Approx(-3.0));
    CHECK(Tb(0, 0).real() == doctest::Approx(3.0));
    Mat Tg = assemble_T_global(sys);
    CHECK(Tg.rows() == 2);
    CHECK((Tg.diagonal().real() - RVec::Map(std::vector<double>{-3.0, 3.0}.data(), 2)).norm() < 1e-15);
}

TEST_CASE("domain states satisfy the constraints") {
    std::mt19937_64 rng(2);
    for (const auto& name : testsupport::preset_names()) {
        HyperbolicSystem sys = testsupport::preset(name);
        SmoothState s = random_domain_state(sys, rng);
        StateVector v = s.sample(uniform_cells(sys, 16));
        CHECK_MESSAGE(constraint_residual(sys, v) < 1e-12, name);
        CHECK(energy(sys, v) > 0);
        // energy is the inner product with itself
        CHECK(std::abs(inner_d(sys, v, v).real() - energy(sys, v)) < 1e-12 * energy(sys, v));
    }
}
