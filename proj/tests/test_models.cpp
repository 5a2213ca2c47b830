#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "support.hpp"

using namespace hypnet;
using json = nlohmann::json;

namespace {

ErrorCode code_of(const std::string& name, const json& params) {
    try {
        instantiate(name, params);
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Ok;
}

}  // namespace

TEST_CASE("registry lists every preset with defaults") {
    std::set<std::string> names;
    for (const auto& m : list_models()) {
        names.insert(m.name);
        CHECK_FALSE(m.description.empty());
        for (const auto& p : m.params) CHECK_FALSE(p.type.empty());
    }
    for (const auto& n : testsupport::preset_names()) CHECK(names.count(n) == 1);
}

TEST_CASE("presets satisfy the standing assumptions") {
    for (const auto& n : testsupport::preset_names()) {
        ModelPreset p = instantiate(n);
        ValidationReport r = validate_assumptions(p.system);
        CHECK_MESSAGE(r.ok, n);
        CHECK(p.name == n);
        CHECK(p.params.is_object());
    }
}

TEST_CASE("parameter validation") {
    CHECK(code_of("nope", json::object()) == ErrorCode::InvalidParameter);
    CHECK(code_of("wave_star", {{"J", 1}}) == ErrorCode::InvalidParameter);
    CHECK(code_of("wave_star", {{"bogus", 1}}) == ErrorCode::InvalidParameter);
    CHECK(code_of("second_sound", {{"length", -1.0}}) == ErrorCode::InvalidParameter);
    CHECK(code_of("wave_star", {{"J", 4}}) == ErrorCode::Ok);
}

TEST_CASE("second sound characteristic speeds") {
    HyperbolicSystem sys = testsupport::preset("second_sound");
    Mat QM = sys.QM(0, 0.3);
    // QM is Hermitian, so its spectrum is real; with unit parameters it is {+-phi, +-1/phi}.
    Eigen::SelfAdjointEigenSolver<Mat> es(la::herm(QM));
    std::vector<double> got(es.eigenvalues().data(), es.eigenvalues().data() + 4);
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<double> want{-phi, -1.0 / phi, 1.0 / phi, phi};
    std::sort(got.begin(), got.end());
    for (int i = 0; i < 4; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-10));
    CHECK(la::rel_asymmetry(QM) < 1e-14);
}

TEST_CASE("classification of presets") {
    struct Expect {
        std::string name, verdict, route;
    };
    // wave_star and telegrapher_y fail the basis condition but reach the group through the adjoint route.
    const std::vector<Expect> table{{"transport", "contractive_semigroup", "basis"},
                                    {"maxwell_two_intervals", "unitary_group", "basis"},
                                    {"telegrapher_y", "unitary_group", "adjoint"},
                                    {"wave_star", "unitary_group", "adjoint"},
                                    {"dirac_network", "unitary_group", "adjoint"}};
    for (const auto& e : table) {
        ClassificationReport r = classify(testsupport::preset(e.name));
        CHECK_MESSAGE(verdict_name(r.verdict) == e.verdict, e.name);
        CHECK_MESSAGE(route_name(r.route) == e.route, e.name);
    }
}

TEST_CASE("wave star trace count is twice the number of arms") {
    for (int J : {2, 3, 5}) {
        HyperbolicSystem sys = testsupport::preset("wave_star", {{"J", J}});
        BasisConditionResult r = basis_condition(sys);
        CHECK(sys.graph.k() == 2 * J);
        CHECK(r.count == r.k);
    }
}

TEST_CASE("telegrapher network has a circulating stationary current") {
    HyperbolicSystem sys = testsupport::preset("telegrapher_y");
    BasisConditionResult r = basis_condition(sys);
    CHECK(r.count == r.k);
    CHECK(r.dim_span == r.k - 1);
}
