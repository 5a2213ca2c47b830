#include "hypnet/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "hypnet/jsonio.hpp"

namespace hypnet::config {

using namespace hypnet::jsonio;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
    throw Error(ErrorCode::ConfigParseError, where + ": " + msg);
}

const json& require(const json& j, const std::string& key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) fail(where, "missing '" + key + "'");
    return j.at(key);
}

template <class T>
T get_or(const json& j, const std::string& key, T fallback, const std::string& where) {
    if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        fail(where + "." + key, "wrong type");
    }
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) fail(where, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) fail(where, "unknown key '" + it.key() + "'");
    }
}

MatrixField to_field(const json& j, const std::string& where) {
    if (j.is_object()) {
        check_keys(j, {"samples"}, where);
        const json& s = require(j, "samples", where);
        if (!s.is_array() || s.size() < 2) fail(where + ".samples", "expected at least two sample matrices");
        std::vector<Mat> samples;
        for (size_t i = 0; i < s.size(); ++i) samples.push_back(to_mat(s[i], where + ".samples[" + std::to_string(i) + "]"));
        for (const auto& m : samples)
            if (m.rows() != samples[0].rows() || m.cols() != samples[0].cols())
                fail(where, "sample matrices differ in shape");
        return MatrixField(samples);
    }
    return MatrixField(to_mat(j, where));
}

json from_field(const MatrixField& f) {
    if (f.is_constant()) return from_mat(f.samples()[0]);
    json s = json::array();
    for (const auto& m : f.samples()) s.push_back(from_mat(m));
    return json{{"samples", s}};
}

GraphSpec parse_graph(const json& j) {
    const std::string where = "graph";
    check_keys(j, {"vertices", "edges"}, where);
    GraphSpec g;
    const json& vs = require(j, "vertices", where);
    if (!vs.is_array()) fail(where + ".vertices", "expected an array of ids");
    for (const auto& v : vs) {
        if (!v.is_string()) fail(where + ".vertices", "vertex ids must be strings");
        g.vertices.push_back(v.get<std::string>());
    }
    const json& es = require(j, "edges", where);
    if (!es.is_array()) fail(where + ".edges", "expected an array");
    for (size_t i = 0; i < es.size(); ++i) {
        const std::string w = where + ".edges[" + std::to_string(i) + "]";
        check_keys(es[i], {"id", "tail", "head", "length", "dim"}, w);
        EdgeSpec e;
        e.id = get_or<std::string>(es[i], "id", "", w);
        if (e.id.empty()) fail(w, "missing 'id'");
        e.tail = get_or<std::string>(es[i], "tail", "", w);
        e.head = get_or<std::string>(es[i], "head", "", w);
        e.length = get_or<double>(es[i], "length", 1.0, w);
        e.dim = get_or<int>(es[i], "dim", 1, w);
        g.edges.push_back(e);
    }
    return g;
}

ConditionInput parse_condition(const json& j, int n, const std::string& where) {
    check_keys(j, {"Y", "Yd", "B", "C", "Q"}, where);
    ConditionInput in;
    if (j.contains("Y") && !j.at("Y").is_null()) in.Y_span = to_span(j.at("Y"), n, where + ".Y");
    in.Yd_span = j.contains("Yd") ? to_span(j.at("Yd"), n, where + ".Yd") : Mat(n, 0);
    auto square = [&](const char* key) -> std::optional<Mat> {
        if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
        Mat m = to_mat(j.at(key), where + "." + key);
        if (m.rows() != n || m.cols() != n)
            fail(where + "." + key, "must be " + std::to_string(n) + "x" + std::to_string(n));
        return m;
    };
    in.B = square("B");
    in.C = square("C");
    in.Q = square("Q");
    return in;
}

json condition_json(const ConditionBlock& b) {
    json c;
    c["Y"] = from_span(b.Y);
    c["Yd"] = from_span(b.Yd);
    c["B"] = from_mat(b.B);
    c["C"] = from_mat(b.C);
    c["Q"] = from_mat(b.Q);
    return c;
}

const std::map<std::string, double Tolerances::*>& tol_fields() {
    static const std::map<std::string, double Tolerances::*> f{{"sym", &Tolerances::sym}, {"sub", &Tolerances::sub},
                                                                {"det", &Tolerances::det}, {"rank", &Tolerances::rank},
                                                                {"eig", &Tolerances::eig}, {"proj", &Tolerances::proj}};
    return f;
}

}  // namespace

Tolerances apply_overrides(Tolerances tol, const ToleranceOverrides& overrides) {
    for (const auto& [k, v] : overrides) {
        auto it = tol_fields().find(k);
        if (it == tol_fields().end()) throw Error(ErrorCode::InvalidParameter, "unknown tolerance '" + k + "'");
        if (!(v > 0)) throw Error(ErrorCode::InvalidParameter, "tolerance '" + k + "' must be positive");
        tol.*(it->second) = v;
    }
    return tol;
}

ConfigDocument parse(const json& doc, const ToleranceOverrides& overrides) {
    check_keys(doc, {"graph", "coefficients", "vertex_conditions", "tolerances", "simulation"}, "config");
    MetricGraph g = MetricGraph::build(parse_graph(require(doc, "graph", "config")));

    Tolerances tol;
    if (doc.contains("tolerances")) {
        const json& t = doc.at("tolerances");
        if (!t.is_object()) fail("tolerances", "expected an object");
        ToleranceOverrides from_doc;
        for (auto it = t.begin(); it != t.end(); ++it) {
            if (!it.value().is_number()) fail("tolerances." + it.key(), "expected a number");
            from_doc[it.key()] = it.value().get<double>();
        }
        try {
            tol = apply_overrides(tol, from_doc);
        } catch (const Error& e) {
            fail("tolerances", e.what());
        }
    }
    tol = apply_overrides(tol, overrides);

    const json& cs = require(doc, "coefficients", "config");
    if (!cs.is_object()) fail("coefficients", "expected an object keyed by edge id");
    for (auto it = cs.begin(); it != cs.end(); ++it)
        try {
            g.edge_index(it.key());
        } catch (const Error&) {
            fail("coefficients", "unknown edge '" + it.key() + "'");
        }
    std::vector<EdgeCoefficients> coeffs;
    for (const auto& e : g.edges()) {
        const std::string w = "coefficients." + e.id;
        if (!cs.contains(e.id)) fail("coefficients", "missing edge '" + e.id + "'");
        const json& c = cs.at(e.id);
        check_keys(c, {"M", "N", "Q", "dQM"}, w);
        EdgeCoefficients ec;
        ec.M = to_field(require(c, "M", w), w + ".M");
        ec.N = c.contains("N") ? to_field(c.at("N"), w + ".N") : MatrixField(Mat::Zero(e.dim, e.dim));
        ec.Q = c.contains("Q") ? to_field(c.at("Q"), w + ".Q") : MatrixField(Mat::Identity(e.dim, e.dim));
        if (c.contains("dQM")) ec.dQM = to_field(c.at("dQM"), w + ".dQM");
        coeffs.push_back(std::move(ec));
    }

    const json& vc = require(doc, "vertex_conditions", "config");
    check_keys(vc, {"mode", "vertices", "global"}, "vertex_conditions");
    const std::string mode = get_or<std::string>(vc, "mode", "local", "vertex_conditions");
    std::vector<ConditionInput> inputs;
    ConditionMode cm;
    if (mode == "local") {
        cm = ConditionMode::Local;
        const json& vs = require(vc, "vertices", "vertex_conditions");
        if (!vs.is_object()) fail("vertex_conditions.vertices", "expected an object keyed by vertex id");
        for (auto it = vs.begin(); it != vs.end(); ++it)
            try {
                g.vertex_index(it.key());
            } catch (const Error&) {
                fail("vertex_conditions.vertices", "unknown vertex '" + it.key() + "'");
            }
        for (int v = 0; v < g.num_vertices(); ++v) {
            const std::string& id = g.vertex_id(v);
            if (!vs.contains(id)) fail("vertex_conditions.vertices", "missing vertex '" + id + "'");
            inputs.push_back(parse_condition(vs.at(id), g.kv(v), "vertex_conditions.vertices." + id));
        }
    } else if (mode == "global") {
        cm = ConditionMode::Global;
        inputs.push_back(parse_condition(require(vc, "global", "vertex_conditions"), 2 * g.k(), "vertex_conditions.global"));
    } else {
        fail("vertex_conditions.mode", "expected 'local' or 'global'");
    }

    ConfigDocument out;
    out.system = make_system(std::move(g), std::move(coeffs), cm, inputs, tol);
    if (doc.contains("simulation")) {
        const json& s = doc.at("simulation");
        const std::string w = "simulation";
        check_keys(s, {"cells", "t_final", "outputs", "method", "dt", "cfl", "initial"}, w);
        auto& sim = out.simulation;
        sim.cells = get_or<int>(s, "cells", sim.cells, w);
        sim.t_final = get_or<double>(s, "t_final", sim.t_final, w);
        sim.outputs = get_or<int>(s, "outputs", sim.outputs, w);
        sim.method = get_or<std::string>(s, "method", sim.method, w);
        sim.dt = get_or<double>(s, "dt", sim.dt, w);
        sim.cfl = get_or<double>(s, "cfl", sim.cfl, w);
        if (s.contains("initial")) sim.initial = s.at("initial");
    }
    return out;
}

ConfigDocument parse_text(const std::string& text, const ToleranceOverrides& overrides) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        // Convert the byte offset into line and column.
        size_t line = 1, col = 1;
        for (size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::ostringstream os;
        os << "line " << line << ", column " << col << ": invalid JSON";
        throw Error(ErrorCode::ConfigParseError, os.str());
    }
    return parse(doc, overrides);
}

ConfigDocument load_file(const std::string& path, const ToleranceOverrides& overrides) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigParseError, path + ": cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_text(ss.str(), overrides);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigParseError) throw Error(e.code(), path + ": " + e.what());
        throw;
    }
}

json dump_system(const HyperbolicSystem& sys, const SimulationSection* sim) {
    json doc;
    const auto& g = sys.graph;
    json verts = json::array(), edges = json::array();
    for (const auto& v : g.vertices()) verts.push_back(v);
    for (const auto& e : g.edges())
        edges.push_back({{"id", e.id}, {"tail", g.vertex_id(e.tail)}, {"head", g.vertex_id(e.head)}, {"length", e.length},
                         {"dim", e.dim}});
    doc["graph"] = {{"vertices", verts}, {"edges", edges}};
    json cs = json::object();
    for (int e = 0; e < g.num_edges(); ++e) {
        const auto& c = sys.coeffs[e];
        json ce{{"M", from_field(c.M)}, {"N", from_field(c.N)}, {"Q", from_field(c.Q)}};
        if (c.dQM) ce["dQM"] = from_field(*c.dQM);
        cs[g.edge(e).id] = ce;
    }
    doc["coefficients"] = cs;
    json vc;
    if (sys.mode == ConditionMode::Global) {
        vc["mode"] = "global";
        vc["global"] = condition_json(sys.blocks.at(0));
    } else {
        vc["mode"] = "local";
        json vs = json::object();
        for (const auto& b : sys.blocks) vs[b.name] = condition_json(b);
        vc["vertices"] = vs;
    }
    doc["vertex_conditions"] = vc;
    json t = json::object();
    for (const auto& [k, f] : tol_fields()) t[k] = sys.tol.*f;
    doc["tolerances"] = t;
    if (sim) {
        json s{{"cells", sim->cells}, {"t_final", sim->t_final}, {"outputs", sim->outputs}, {"method", sim->method},
               {"dt", sim->dt}, {"cfl", sim->cfl}};
        if (!sim->initial.is_null()) s["initial"] = sim->initial;
        doc["simulation"] = s;
    }
    return doc;
}

json number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

namespace {

json cone_json(const ConeCheckResult& c) {
    json j{{"holds", c.holds}, {"mode", c.mode == ConeMode::Null ? "null" : "nonpositive"}, {"extremal", number(c.extremal)},
           {"dim", c.dim}};
    if (c.witness.size() > 0) j["witness"] = from_vec(c.witness);
    return j;
}

json opt_number(const std::optional<double>& v) { return v ? number(*v) : json(nullptr); }

const char* shortcut_name(Shortcut s) {
    switch (s) {
        case Shortcut::None: return "none";
        case Shortcut::Stationary: return "stationary";
        case Shortcut::SurjectiveB: return "surjective_B";
    }
    return "?";
}

}  // namespace

json to_json(const ValidationReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name}, {"pass", c.pass}, {"value", number(c.value)}, {"location", c.location}});
    return {{"ok", r.ok}, {"checks", checks}, {"warnings", r.warnings}};
}

json to_json(const BasisConditionResult& r) {
    json blocks = json::array();
    for (const auto& b : r.blocks)
        blocks.push_back({{"name", b.name},
                          {"dim_Y_perp", b.dim_Yperp},
                          {"dim_ran_B_star", b.dim_ranBstar},
                          {"dim_ker_B_star", b.dim_kerBstar},
                          {"dim_Z", b.dim_Z},
                          {"dim_Y", b.dim_Y},
                          {"dim_Yd", b.dim_Yd},
                          {"B_surjective", b.B_surjective}});
    return {{"holds", r.holds},       {"dim_span", r.dim_span},           {"k", r.k},
            {"count", r.count},       {"shortcut", shortcut_name(r.shortcut)}, {"shortcut_identity", r.shortcut_identity},
            {"blocks", blocks}};
}

json to_json(const ClassificationReport& r) {
    json blocks = json::array();
    for (const auto& b : r.blocks)
        blocks.push_back({{"name", b.name},
                          {"min_lambda", number(b.min_lambda)},
                          {"null_cone", cone_json(b.null_cone)},
                          {"yd_lambda", number(b.yd_lambda)},
                          {"yd_null_lambda", opt_number(b.yd_null_lambda)},
                          {"y_null_lambda", opt_number(b.y_null_lambda)},
                          {"adjoint_mu", number(b.adjoint_mu)},
                          {"adjoint_null_mu", opt_number(b.adjoint_null_mu)},
                          {"adjoint_dim", b.adjoint_dim},
                          {"C_cone", cone_json(b.c_cone)},
                          {"C_null", cone_json(b.c_null)},
                          {"adjoint_C_null", cone_json(b.adjoint_c_null)},
                          {"combined_cone", cone_json(b.combined_cone)}});
    json ar{{"holds", r.adjoint_route.holds},
            {"group", r.adjoint_route.group},
            {"yd_cone_lambda", number(r.adjoint_route.yd_cone_lambda)},
            {"y_cone_lambda", number(r.adjoint_route.y_cone_lambda)},
            {"adjoint_cone_mu", number(r.adjoint_route.adjoint_cone_mu)}};
    json ef{{"nonpositive", r.edge_form.nonpositive},
            {"null", r.edge_form.null},
            {"max_eig", number(r.edge_form.max_eig)},
            {"max_abs", number(r.edge_form.max_abs)},
            {"location", r.edge_form.location}};
    return {{"verdict", verdict_name(r.verdict)},
            {"route", route_name(r.route)},
            {"basis_verdict", verdict_name(r.basis_verdict)},
            {"adjoint_verdict", verdict_name(r.adjoint_verdict)},
            {"assumptions_ok", r.assumptions_ok},
            {"basis_condition", to_json(r.basis)},
            {"basis_ok", r.basis_ok},
            {"blocks", blocks},
            {"semigroup_lambda", opt_number(r.semigroup_lambda)},
            {"group_ok", r.group_ok},
            {"adjoint_route", ar},
            {"edge_form", ef},
            {"contractive", r.contractive},
            {"unitary", r.unitary}};
}

json to_json(const QualReport& r) {
    json conds = json::array();
    for (const auto& c : r.conditions)
        conds.push_back({{"name", c.name}, {"pass", c.pass}, {"value", number(c.value)}, {"detail", c.detail},
                         {"sampled", c.sampled}});
    json j{{"property", property_name(r.property)},
           {"static_verdict", r.certified ? "certified" : "not_certified"},
           {"conditions", conds},
           {"failed_conditions", r.failed_conditions},
           {"notes", r.notes}};
    if (r.dynamic) {
        const auto& d = *r.dynamic;
        json dj{{"verdict", d.violated ? "violated" : "consistent"},
                {"magnitude", number(d.magnitude)},
                {"raw_excursion", number(d.raw_excursion)},
                {"trials", d.trials},
                {"cells", d.cells}};
        if (d.violated) dj["t"] = d.t;
        if (r.property == Property::Positive) dj["min_value"] = number(d.min_value);
        j["dynamic_verdict"] = dj;
    } else {
        j["dynamic_verdict"] = nullptr;
    }
    return j;
}

json to_json(const std::vector<ModelInfo>& models) {
    json out = json::array();
    for (const auto& m : models) {
        json ps = json::array();
        for (const auto& p : m.params)
            ps.push_back({{"name", p.name}, {"type", p.type}, {"default", p.default_value}, {"constraint", p.constraint}});
        out.push_back({{"name", m.name}, {"description", m.description}, {"params", ps}});
    }
    return out;
}

}  // namespace hypnet::config
