// Exercises the shared library through its C header only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <string>
#include <thread>

#include <json.hpp>

#include "hypnet/hypnet.h"

using json = nlohmann::json;

namespace {

struct Str {
    char* p = nullptr;
    ~Str() { hn_string_free(p); }
    json parse() const { return json::parse(p); }
};

struct Sys {
    hn_system* h = nullptr;
    ~Sys() { hn_system_free(h); }
};

const char* kScalar = R"({
  "graph": {"vertices": ["a", "b"], "edges": [{"id": "e", "tail": "a", "head": "b", "length": 1.0, "dim": 1}]},
  "coefficients": {"e": {"M": [[-1.0]]}},
  "vertex_conditions": {"mode": "local", "vertices": {"a": {"Y": [], "Yd": []}, "b": {"Y": [[1.0]], "Yd": []}}}
})";

}  // namespace

TEST_CASE("version and status names") {
    CHECK(std::strlen(hn_version()) > 0);
    CHECK(std::string(hn_status_name(HN_OK)) == "Ok");
    CHECK(std::string(hn_status_name(HN_ERR_SINGULAR_BOUNDARY_SYSTEM)) == "SingularBoundarySystem");
    CHECK(std::string(hn_status_name(HN_ERR_NULL_ARGUMENT)) == "NullArgument");
    CHECK(std::string(hn_status_name(999)) == "Unknown");
}

TEST_CASE("null arguments are rejected") {
    Str out;
    CHECK(hn_check(nullptr, &out.p) == HN_ERR_NULL_ARGUMENT);
    CHECK(std::string(hn_last_error()).find("sys") != std::string::npos);
    CHECK(hn_system_from_json(nullptr, nullptr, nullptr) == HN_ERR_NULL_ARGUMENT);
    CHECK(hn_models_list(nullptr) == HN_ERR_NULL_ARGUMENT);
    hn_system_free(nullptr);
    hn_string_free(nullptr);
}

TEST_CASE("load, check and classify a document") {
    Sys s;
    REQUIRE(hn_system_from_json(kScalar, nullptr, &s.h) == HN_OK);
    Str chk, cls;
    REQUIRE(hn_check(s.h, &chk.p) == HN_OK);
    CHECK(chk.parse()["ok"] == true);
    REQUIRE(hn_classify(s.h, R"({"lambda": 0.0, "mu": 0.0})", &cls.p) == HN_OK);
    json c = cls.parse();
    CHECK(c["verdict"] == "contractive_semigroup");
    CHECK(c["at_lambda"]["blocks"].size() == 2);
    CHECK(c.contains("at_mu"));
}

TEST_CASE("errors carry codes and messages") {
    Sys s;
    CHECK(hn_system_from_json("{ not json", nullptr, &s.h) == HN_ERR_CONFIG_PARSE);
    CHECK(s.h == nullptr);
    CHECK(std::string(hn_last_error()).find("line") != std::string::npos);

    std::string bad = kScalar;
    bad.replace(bad.find("1.0, \"dim\""), 3, "0.0");
    CHECK(hn_system_from_json(bad.c_str(), nullptr, &s.h) == HN_ERR_NON_POSITIVE_LENGTH);
    CHECK(hn_system_from_model("nope", nullptr, &s.h) == HN_ERR_INVALID_PARAMETER);
    CHECK(hn_system_from_json(kScalar, R"({"sym": "x"})", &s.h) == HN_ERR_CONFIG_PARSE);

    Sys d;
    REQUIRE(hn_system_from_model("dirac_network", nullptr, &d.h) == HN_OK);
    Str out;
    CHECK(hn_resolvent(d.h, nullptr, nullptr, &out.p) == HN_ERR_SINGULAR_BOUNDARY_SYSTEM);
    CHECK(out.p == nullptr);
}

TEST_CASE("dump round trip through the C interface") {
    Sys a;
    REQUIRE(hn_system_from_model("wave_star", R"({"J": 4})", &a.h) == HN_OK);
    Str dumped;
    REQUIRE(hn_system_dump(a.h, &dumped.p) == HN_OK);
    Sys b;
    REQUIRE(hn_system_from_json(dumped.p, nullptr, &b.h) == HN_OK);
    Str ca, cb;
    REQUIRE(hn_classify(a.h, nullptr, &ca.p) == HN_OK);
    REQUIRE(hn_classify(b.h, nullptr, &cb.p) == HN_OK);
    CHECK(ca.parse()["verdict"] == cb.parse()["verdict"]);
    CHECK(ca.parse()["basis_condition"] == cb.parse()["basis_condition"]);
}

TEST_CASE("simulate and qual") {
    Sys s;
    REQUIRE(hn_system_from_model("maxwell_two_intervals", nullptr, &s.h) == HN_OK);
    Str sim;
    REQUIRE(hn_simulate(s.h, R"({"cells": 16, "t_final": 1.0, "method": "expm"})", nullptr, &sim.p) == HN_OK);
    json j = sim.parse();
    CHECK(j["max_relative_energy_change"].get<double>() < 1e-9);
    CHECK(j["files"].empty());

    Str q;
    REQUIRE(hn_qual(s.h, R"({"property": "real", "trials": 2, "cells": 16})", &q.p) == HN_OK);
    json r = q.parse();
    CHECK(r["static_verdict"] == "certified");
    CHECK(r["dynamic_verdict"]["verdict"] == "consistent");

    Str bad;
    CHECK(hn_qual(s.h, R"({"property": "complex"})", &bad.p) == HN_ERR_INVALID_PARAMETER);
}

TEST_CASE("last error is per thread") {
    Str out;
    CHECK(hn_check(nullptr, &out.p) == HN_ERR_NULL_ARGUMENT);
    std::string other;
    std::thread t([&] { other = hn_last_error(); });
    t.join();
    CHECK(other.empty());
    CHECK_FALSE(std::string(hn_last_error()).empty());
}

TEST_CASE("models list") {
    Str out;
    REQUIRE(hn_models_list(&out.p) == HN_OK);
    json j = out.parse();
    CHECK(j.size() == 6);
    Str dump;
    REQUIRE(hn_model_dump("transport", R"({"C": [[-1, 0.5], [0.5, -1]]})", &dump.p) == HN_OK);
    CHECK(dump.parse().contains("graph"));
}
