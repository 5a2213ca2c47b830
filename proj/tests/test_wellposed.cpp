#include <doctest.h>

#include "hypnet/state.hpp"
#include "support.hpp"

using namespace hypnet;
using testsupport::preset;

TEST_CASE("cone check on diagonal forms") {
    Mat F = Mat::Zero(3, 3);
    F.diagonal() << -1.0, 0.0, 2.0;
    Mat S = Mat::Identity(3, 3).leftCols(2);
    ConeCheckResult r = cone_check(F, S, ConeMode::Nonpositive, 1e-10);
    CHECK(r.holds);
    CHECK(r.extremal == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_FALSE(cone_check(F, Mat::Identity(3, 3), ConeMode::Nonpositive, 1e-10).holds);
    CHECK_FALSE(cone_check(F, S, ConeMode::Null, 1e-10).holds);
    CHECK(cone_check(F, S.rightCols(1), ConeMode::Null, 1e-10).holds);
}

TEST_CASE("minimal shift against a closed form") {
    // F = diag(3, -1), W = diag(2, 1): need 3 - 2t <= 0 and -1 - t <= 0, so t = 1.5
    Mat F = Mat::Zero(2, 2), W = Mat::Zero(2, 2);
    F.diagonal() << 3.0, -1.0;
    W.diagonal() << 2.0, 1.0;
    CHECK(min_shift(F, W, 1e-12) == doctest::Approx(1.5));
    // positive direction without weight: no finite shift
    W(0, 0) = 0.0;
    CHECK(std::isinf(min_shift(F, W, 1e-12)));
    // already nonpositive
    CHECK(min_shift(-Mat::Identity(2, 2), Mat::Identity(2, 2), 1e-12) == 0.0);
}

TEST_CASE("minimal shift is sharp") {
    HyperbolicSystem sys = preset("transport");
    for (int b = 0; b < static_cast<int>(sys.blocks.size()); ++b) {
        const auto& blk = sys.blocks[b];
        const double lam = min_lambda(sys, b);
        REQUIRE(std::isfinite(lam));
        Mat F = boundary_form(sys, b);
        CHECK(cone_check(F - lam * blk.Q, blk.Y, ConeMode::Nonpositive, 1e-9).holds);
        if (lam > 0) CHECK_FALSE(cone_check(F - (lam - 1e-3) * blk.Q, blk.Y, ConeMode::Nonpositive, 1e-9).holds);
    }
}

TEST_CASE("two interval Maxwell system is unitary by the basis route") {
    ClassificationReport r = classify(preset("maxwell_two_intervals"));
    CHECK(r.assumptions_ok);
    CHECK(r.basis.holds);
    CHECK(r.basis.count == r.basis.k);
    CHECK(r.basis.dim_span == 4);
    CHECK(r.verdict == Verdict::UnitaryGroup);
    CHECK(r.route == Route::Basis);
    CHECK(std::string(verdict_name(r.verdict)) == "unitary_group");
}

TEST_CASE("Dirac network needs the adjoint route") {
    HyperbolicSystem sys = preset("dirac_network");
    ClassificationReport r = classify(sys);
    CHECK_FALSE(r.basis.holds);
    CHECK(r.basis.dim_span == 2);
    CHECK(r.basis.k == 4);
    CHECK(r.route == Route::Adjoint);
    CHECK(r.verdict == Verdict::UnitaryGroup);
    for (int b = 0; b < static_cast<int>(sys.blocks.size()); ++b) {
        CHECK(adjoint_cone_check(sys, b, 0.0, ConeMode::Null).holds);
        CHECK(min_lambda(sys, b) == 0.0);
    }
}

TEST_CASE("basis count equals trace dimension under surjective feedback") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 15; ++trial) {
        HyperbolicSystem sys = testsupport::random_basis_system(rng);
        BasisConditionResult r = basis_condition(sys);
        CHECK(r.count == sys.graph.k());
        int sum = 0;
        for (const auto& b : r.blocks) {
            CHECK(b.dim_Yperp + b.dim_ranBstar + b.dim_kerBstar == b.dim_Z);
            sum += b.dim_Z;
        }
        CHECK(sum == r.count);
    }
}

TEST_CASE("second sound boundary form couples weighted and unweighted traces") {
    HyperbolicSystem sys = preset("second_sound");
    int v1 = -1;
    for (int b = 0; b < static_cast<int>(sys.blocks.size()); ++b)
        if (sys.blocks[b].name == "v1") v1 = b;
    REQUIRE(v1 >= 0);
    const auto& blk = sys.blocks[v1];
    // Directions of Y orthogonal to Yd carry no vertex weight. The form vanishes there but not across,
    // so F(a + t b) grows linearly in t while the weight only sees a: no shift can compensate.
    Mat free_part = la::orth((Mat::Identity(blk.dim, blk.dim) - blk.Pd()) * blk.Y, 1e-10);
    REQUIRE(free_part.cols() > 0);
    Mat F = la::herm(boundary_form(sys, v1));
    CHECK((free_part.adjoint() * F * free_part).norm() < 1e-12);
    CHECK((blk.Yd.adjoint() * F * free_part).norm() > 1e-3);
    CHECK(std::isinf(min_lambda(sys, v1)));
}

TEST_CASE("classification is unchanged by a unitary change of Y spanning vectors") {
    std::mt19937_64 rng(8);
    HyperbolicSystem a = testsupport::random_valid_basis_system(rng);
    ClassificationReport ra = classify(a);
    // same subspaces, different spanning vectors: rebuild through make_system
    std::vector<ConditionInput> inputs;
    for (const auto& b : a.blocks) {
        ConditionInput in;
        in.Y_span = b.Y * la::random_matrix(rng, b.Y.cols(), b.Y.cols());
        in.Yd_span = b.Yd * la::random_matrix(rng, b.dd(), b.dd());
        in.B = b.B;
        in.C = b.C;
        in.Q = b.Q;
        inputs.push_back(in);
    }
    HyperbolicSystem c = make_system(a.graph, a.coeffs, a.mode, inputs);
    ClassificationReport rc = classify(c);
    CHECK(ra.verdict == rc.verdict);
    CHECK(ra.basis.holds == rc.basis.holds);
    REQUIRE(ra.semigroup_lambda.has_value() == rc.semigroup_lambda.has_value());
    if (ra.semigroup_lambda) CHECK(*ra.semigroup_lambda == doctest::Approx(*rc.semigroup_lambda).epsilon(1e-8));
}
