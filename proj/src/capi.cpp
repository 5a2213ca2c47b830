#include "hypnet/hypnet.h"

#include <cstring>
#include <optional>
#include <string>

#include "hypnet/app.hpp"

struct hn_system {
    hypnet::config::ConfigDocument doc;
};

namespace {

using hypnet::ErrorCode;
using json = nlohmann::json;

static_assert(static_cast<int>(ErrorCode::Internal) == HN_ERR_INTERNAL);
static_assert(static_cast<int>(ErrorCode::ConfigParseError) == HN_ERR_CONFIG_PARSE);

thread_local std::string last_error;

int fail(int code, const std::string& msg) {
    last_error = msg;
    return code;
}

template <class F>
int guarded(F&& f) {
    try {
        last_error.clear();
        f();
        return HN_OK;
    } catch (const hypnet::Error& e) {
        return fail(static_cast<int>(e.code()), e.what());
    } catch (const json::exception& e) {
        return fail(HN_ERR_CONFIG_PARSE, e.what());
    } catch (const std::exception& e) {
        return fail(HN_ERR_INTERNAL, e.what());
    }
}

char* dup(const std::string& s) {
    char* p = new char[s.size() + 1];
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

json parse_opt(const char* text, const char* what) {
    if (!text || !*text) return json::object();
    try {
        json j = json::parse(text);
        if (!j.is_object()) throw hypnet::Error(ErrorCode::ConfigParseError, std::string(what) + ": expected an object");
        return j;
    } catch (const json::parse_error&) {
        throw hypnet::Error(ErrorCode::ConfigParseError, std::string(what) + ": invalid JSON");
    }
}

hypnet::config::ToleranceOverrides tolerances(const char* text) {
    hypnet::config::ToleranceOverrides o;
    json j = parse_opt(text, "tolerances");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!it.value().is_number()) throw hypnet::Error(ErrorCode::ConfigParseError, "tolerances: expected numbers");
        o[it.key()] = it.value().get<double>();
    }
    return o;
}

#define HN_REQUIRE(p) \
    if (!(p)) return fail(HN_ERR_NULL_ARGUMENT, #p " must not be null")

}  // namespace

extern "C" {

const char* hn_version(void) { return "1.0.0"; }

const char* hn_status_name(int status) {
    if (status == HN_ERR_NULL_ARGUMENT) return "NullArgument";
    if (status < 0 || status > HN_ERR_INTERNAL) return "Unknown";
    return hypnet::error_name(static_cast<ErrorCode>(status));
}

const char* hn_last_error(void) { return last_error.c_str(); }

void hn_string_free(char* s) { delete[] s; }

int hn_system_from_json(const char* config_json, const char* tolerances_json, hn_system** out) {
    HN_REQUIRE(config_json);
    HN_REQUIRE(out);
    *out = nullptr;
    return guarded([&] {
        auto doc = hypnet::config::parse_text(config_json, tolerances(tolerances_json));
        *out = new hn_system{std::move(doc)};
    });
}

int hn_system_from_file(const char* path, const char* tolerances_json, hn_system** out) {
    HN_REQUIRE(path);
    HN_REQUIRE(out);
    *out = nullptr;
    return guarded([&] {
        auto doc = hypnet::config::load_file(path, tolerances(tolerances_json));
        *out = new hn_system{std::move(doc)};
    });
}

int hn_system_from_model(const char* name, const char* params_json, hn_system** out) {
    HN_REQUIRE(name);
    HN_REQUIRE(out);
    *out = nullptr;
    return guarded([&] {
        auto preset = hypnet::instantiate(name, parse_opt(params_json, "params"));
        *out = new hn_system{{std::move(preset.system), {}}};
    });
}

void hn_system_free(hn_system* sys) { delete sys; }

int hn_system_dump(const hn_system* sys, char** out_json) {
    HN_REQUIRE(sys);
    HN_REQUIRE(out_json);
    return guarded([&] {
        *out_json = dup(hypnet::config::dump_system(sys->doc.system, &sys->doc.simulation).dump(2));
    });
}

int hn_check(const hn_system* sys, char** out_json) {
    HN_REQUIRE(sys);
    HN_REQUIRE(out_json);
    return guarded([&] { *out_json = dup(hypnet::app::run_check(sys->doc.system).dump(2)); });
}

int hn_classify(const hn_system* sys, const char* options_json, char** out_json) {
    HN_REQUIRE(sys);
    HN_REQUIRE(out_json);
    return guarded([&] {
        json o = parse_opt(options_json, "options");
        std::optional<double> lambda, mu;
        if (o.contains("lambda")) lambda = o.at("lambda").get<double>();
        if (o.contains("mu")) mu = o.at("mu").get<double>();
        *out_json = dup(hypnet::app::run_classify(sys->doc.system, lambda, mu).dump(2));
    });
}

int hn_qual(const hn_system* sys, const char* options_json, char** out_json) {
    HN_REQUIRE(sys);
    HN_REQUIRE(out_json);
    return guarded([&] {
        json o = parse_opt(options_json, "options");
        hypnet::app::QualRequest req;
        req.property = hypnet::parse_property(o.value("property", "real"));
        req.dynamic = o.value("dynamic", true);
        req.probe.trials = o.value("trials", req.probe.trials);
        req.probe.cells = o.value("cells", req.probe.cells);
        req.probe.seed = o.value("seed", 0ULL);
        *out_json = dup(hypnet::app::run_qual(sys->doc.system, req).dump(2));
    });
}

int hn_simulate(const hn_system* sys, const char* options_json, const char* out_dir, char** out_json) {
    HN_REQUIRE(sys);
    HN_REQUIRE(out_json);
    return guarded([&] {
        json o = parse_opt(options_json, "options");
        hypnet::app::SimulateRequest req;
        req.sim = sys->doc.simulation;
        req.sim.cells = o.value("cells", req.sim.cells);
        req.sim.t_final = o.value("t_final", req.sim.t_final);
        req.sim.outputs = o.value("outputs", req.sim.outputs);
        req.sim.method = o.value("method", req.sim.method);
        req.sim.dt = o.value("dt", req.sim.dt);
        req.sim.cfl = o.value("cfl", req.sim.cfl);
        if (o.contains("initial")) req.sim.initial = o.at("initial");
        req.seed = o.value("seed", 0ULL);
        req.out_dir = out_dir ? out_dir : "";
        *out_json = dup(hypnet::app::run_simulate(sys->doc.system, req).dump(2));
    });
}

int hn_resolvent(const hn_system* sys, const char* options_json, const char* out_dir, char** out_json) {
    HN_REQUIRE(sys);
    HN_REQUIRE(out_json);
    return guarded([&] {
        json o = parse_opt(options_json, "options");
        hypnet::app::ResolventRequest req;
        if (o.contains("f"))
            for (auto it = o.at("f").begin(); it != o.at("f").end(); ++it) req.f_files[it.key()] = it.value().get<std::string>();
        if (o.contains("g")) req.g = o.at("g");
        req.cells = o.value("cells", req.cells);
        req.out_dir = out_dir ? out_dir : "";
        *out_json = dup(hypnet::app::run_resolvent(sys->doc.system, req).dump(2));
    });
}

int hn_models_list(char** out_json) {
    HN_REQUIRE(out_json);
    return guarded([&] { *out_json = dup(hypnet::app::models_list().dump(2)); });
}

int hn_model_dump(const char* name, const char* params_json, char** out_json) {
    HN_REQUIRE(name);
    HN_REQUIRE(out_json);
    return guarded([&] { *out_json = dup(hypnet::app::model_dump(name, parse_opt(params_json, "params")).dump(2)); });
}

}  // extern "C"
