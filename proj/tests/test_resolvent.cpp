#include <doctest.h>

#include <cmath>

#include "hypnet/resolvent.hpp"
#include "support.hpp"

using namespace hypnet;

namespace {

std::vector<Mat> smooth_rhs(const HyperbolicSystem& sys, const std::vector<int>& cells, std::mt19937_64& rng) {
    std::vector<Mat> f;
    for (int e = 0; e < sys.graph.num_edges(); ++e) {
        const auto& ed = sys.graph.edge(e);
        Mat a = la::random_matrix(rng, ed.dim, 3);
        Mat fe(ed.dim, cells[e] + 1);
        for (int j = 0; j <= cells[e]; ++j) {
            const double s = double(j) / cells[e];
            fe.col(j) = a.col(0) + a.col(1) * std::sin(2.0 * s) + a.col(2) * s * s;
        }
        f.push_back(fe);
    }
    return f;
}

double roundtrip_residual(const HyperbolicSystem& sys, int n, std::mt19937_64& rng) {
    std::vector<int> cells = uniform_cells(sys, n);
    StateVector rhs;
    rhs.u = smooth_rhs(sys, cells, rng);
    rhs.x = la::random_matrix(rng, sys.total_dd(), 1).col(0);
    ResolventSolution sol = solve_A0(sys, rhs.u, rhs.x);
    CHECK(constraint_residual(sys, sol.state) < 1e-10);
    StateVector back = apply_A(sys, sol.state, OperatorKind::Reduced);
    return d_norm(sys, back - rhs) / d_norm(sys, rhs);
}

}  // namespace

TEST_CASE("differences are exact on quartics") {
    HyperbolicSystem sys = testsupport::preset("maxwell_two_intervals");
    std::vector<int> cells = uniform_cells(sys, 12);
    std::vector<Mat> u, du;
    for (int e = 0; e < sys.graph.num_edges(); ++e) {
        const auto& ed = sys.graph.edge(e);
        Mat ue(ed.dim, cells[e] + 1), de(ed.dim, cells[e] + 1);
        for (int j = 0; j <= cells[e]; ++j) {
            const double x = j * ed.length / cells[e];
            ue.col(j).setConstant(x * x * x * x - 2.0 * x);
            de.col(j).setConstant(4.0 * x * x * x - 2.0);
        }
        u.push_back(ue);
        du.push_back(de);
    }
    std::vector<Mat> got = differentiate(sys, u);
    for (size_t e = 0; e < u.size(); ++e) CHECK((got[e] - du[e]).norm() < 1e-9 * du[e].norm());
}

TEST_CASE("solve then apply recovers the data") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 5; ++trial) {
        HyperbolicSystem sys = testsupport::random_valid_basis_system(rng);
        CHECK(roundtrip_residual(sys, 400, rng) < 1e-5);
    }
    CHECK(roundtrip_residual(testsupport::preset("maxwell_two_intervals"), 400, rng) < 1e-5);
}

TEST_CASE("round trip error falls at second order") {
    std::mt19937_64 rng(12);
    HyperbolicSystem sys = testsupport::random_valid_basis_system(rng);
    std::vector<int> n{50, 100, 200};
    std::vector<double> err;
    for (int m : n) {
        std::mt19937_64 same(99);
        err.push_back(roundtrip_residual(sys, m, same));
    }
    CHECK(testsupport::observed_order(n, err) > 1.8);
}

TEST_CASE("singular boundary systems are reported") {
    HyperbolicSystem sys = testsupport::preset("dirac_network");
    std::vector<int> cells = uniform_cells(sys, 16);
    std::vector<Mat> f;
    for (int e = 0; e < sys.graph.num_edges(); ++e) f.push_back(Mat::Zero(sys.graph.edge(e).dim, cells[e] + 1));
    try {
        solve_A0(sys, f, Vec::Zero(sys.total_dd()));
        FAIL("expected SingularBoundarySystem");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SingularBoundarySystem);
    }
}

TEST_CASE("apply rejects states outside the domain") {
    HyperbolicSystem sys = testsupport::preset("maxwell_two_intervals");
    std::mt19937_64 rng(1);
    std::vector<int> cells = uniform_cells(sys, 16);
    StateVector s = zero_state(sys, cells);
    for (auto& u : s.u) u = la::random_matrix(rng, u.rows(), u.cols());
    CHECK_THROWS_AS(apply_A(sys, s), Error);
}
