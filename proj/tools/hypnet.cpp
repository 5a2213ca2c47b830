// Command-line front end over the hypnet C interface.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hypnet/hypnet.h"

namespace {

using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitVerdict = 1;
constexpr int kExitInput = 2;

struct Failure {
    int status;
    std::string message;
};

// Owns a string returned by the library.
struct Owned {
    char* p = nullptr;
    ~Owned() { hn_string_free(p); }
    std::string str() const { return p ? p : ""; }
};

void check(int status) {
    if (status != HN_OK) throw Failure{status, hn_last_error()};
}

struct System {
    hn_system* h = nullptr;
    ~System() { hn_system_free(h); }
};

struct Source {
    std::string config;
    std::string model;
    std::string params;
    std::map<std::string, double> tol;
};

void add_source(CLI::App* cmd, Source& src) {
    cmd->add_option("config", src.config, "system description (JSON)");
    cmd->add_option("--model", src.model, "use a built-in model instead of a file");
    cmd->add_option("--params", src.params, "model parameters as a JSON object");
    for (const char* key : {"sym", "sub", "det", "rank", "eig", "proj"}) {
        std::string flag = std::string("--tol-") + key;
        cmd->add_option_function<double>(flag, [&src, key](double v) { src.tol[key] = v; }, "tolerance override");
    }
}

void load(const Source& src, System& sys) {
    if (src.config.empty() == src.model.empty())
        throw Failure{HN_ERR_INVALID_PARAMETER, "give either a config file or --model"};
    json tol = json::object();
    for (const auto& [k, v] : src.tol) tol[k] = v;
    const std::string tol_text = tol.dump();
    if (!src.config.empty()) {
        check(hn_system_from_file(src.config.c_str(), tol_text.c_str(), &sys.h));
        return;
    }
    Owned dumped;
    check(hn_model_dump(src.model.c_str(), src.params.empty() ? nullptr : src.params.c_str(), &dumped.p));
    check(hn_system_from_json(dumped.p, tol_text.c_str(), &sys.h));
}

// A JSON value given inline or as a path to a file holding it.
json inline_or_file(const std::string& text) {
    std::ifstream in(text);
    if (in) {
        std::stringstream ss;
        ss << in.rdbuf();
        return json::parse(ss.str());
    }
    return json::parse(text);
}

void print(const std::string& s) { std::cout << s << '\n'; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Linear hyperbolic systems on metric graphs"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", hn_version());

    bool strict = false;
    unsigned long long seed = 0;
    app.add_flag("--strict", strict, "exit 1 when a verdict fails");
    app.add_option("--seed", seed, "seed for random states and probes");

    Source src;

    auto* check_cmd = app.add_subcommand("check", "validate standing assumptions");
    add_source(check_cmd, src);

    std::optional<double> lambda, mu;
    auto* classify_cmd = app.add_subcommand("classify", "classify the generated evolution");
    add_source(classify_cmd, src);
    classify_cmd->add_option_function<double>("--lambda", [&](double v) { lambda = v; }, "boundary cone shift to test");
    classify_cmd->add_option_function<double>("--mu", [&](double v) { mu = v; }, "adjoint cone shift to test");

    std::string out_dir = ".";
    int cells = 0;
    std::vector<std::string> f_specs;
    std::string g_spec;
    auto* resolvent_cmd = app.add_subcommand("resolvent", "solve the stationary problem");
    add_source(resolvent_cmd, src);
    resolvent_cmd->add_option("--f", f_specs, "edge=path of a CSV right-hand side (repeatable)");
    resolvent_cmd->add_option("--g", g_spec, "vertex right-hand side, JSON or a file");
    resolvent_cmd->add_option("--cells", cells, "grid cells for edges without a file")->check(CLI::PositiveNumber);
    resolvent_cmd->add_option("--out", out_dir, "output directory");

    std::optional<double> t_final, dt, cfl;
    std::optional<int> outputs;
    std::string method;
    std::string initial;
    auto* simulate_cmd = app.add_subcommand("simulate", "evolve an initial state");
    add_source(simulate_cmd, src);
    simulate_cmd->add_option("--cells", cells, "cells per edge")->check(CLI::PositiveNumber);
    simulate_cmd->add_option_function<double>("--t-final", [&](double v) { t_final = v; }, "final time");
    simulate_cmd->add_option_function<double>("--dt", [&](double v) { dt = v; }, "time step (0: automatic)");
    simulate_cmd->add_option_function<double>("--cfl", [&](double v) { cfl = v; }, "CFL number for rk4");
    simulate_cmd->add_option_function<int>("--outputs", [&](int v) { outputs = v; }, "number of output times");
    simulate_cmd->add_option("--method", method, "time integrator")->check(CLI::IsMember({"rk4", "expm"}));
    simulate_cmd->add_option("--initial", initial, "initial state description, JSON or a file");
    simulate_cmd->add_option("--out", out_dir, "output directory");

    std::string property = "real";
    int trials = 20;
    bool no_dynamic = false;
    auto* qual_cmd = app.add_subcommand("qual", "check invariance of a convex set");
    add_source(qual_cmd, src);
    qual_cmd->add_option("--property", property, "property to certify")
        ->check(CLI::IsMember({"real", "positive", "linf"}));
    qual_cmd->add_option("--trials", trials, "dynamic probe trials")->check(CLI::NonNegativeNumber);
    qual_cmd->add_option("--cells", cells, "probe grid cells")->check(CLI::PositiveNumber);
    qual_cmd->add_flag("--static-only", no_dynamic, "skip the dynamic probe");

    std::string model_name;
    std::string model_params;
    auto* models_cmd = app.add_subcommand("models", "built-in model presets");
    models_cmd->require_subcommand(1);
    auto* list_cmd = models_cmd->add_subcommand("list", "list presets and parameters");
    auto* dump_cmd = models_cmd->add_subcommand("dump", "print a preset as a config document");
    dump_cmd->add_option("name", model_name, "preset name")->required();
    dump_cmd->add_option("--params", model_params, "parameters as a JSON object");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (models_cmd->parsed()) {
            Owned out;
            if (list_cmd->parsed())
                check(hn_models_list(&out.p));
            else if (dump_cmd->parsed())
                check(hn_model_dump(model_name.c_str(), model_params.empty() ? nullptr : model_params.c_str(), &out.p));
            print(out.str());
            return kExitOk;
        }

        System sys;
        load(src, sys);

        if (check_cmd->parsed()) {
            Owned out;
            check(hn_check(sys.h, &out.p));
            print(out.str());
            const json rep = json::parse(out.str());
            if (!rep.at("ok").get<bool>()) {
                for (const auto& c : rep.at("checks"))
                    if (!c.at("pass").get<bool>())
                        std::cerr << "hypnet: " << c.at("name").get<std::string>() << " fails at "
                                  << c.at("location").get<std::string>() << '\n';
                return kExitInput;
            }
            return kExitOk;
        }

        if (classify_cmd->parsed()) {
            json opt = json::object();
            if (lambda) opt["lambda"] = *lambda;
            if (mu) opt["mu"] = *mu;
            const std::string opt_text = opt.dump();
            Owned out;
            check(hn_classify(sys.h, opt_text.c_str(), &out.p));
            print(out.str());
            const json rep = json::parse(out.str());
            bool ok = rep.at("verdict").get<std::string>() != "inconclusive";
            for (const char* key : {"at_lambda", "at_mu"})
                if (rep.contains(key))
                    for (const auto& b : rep.at(key).at("blocks")) ok = ok && b.at("holds").get<bool>();
            return strict && !ok ? kExitVerdict : kExitOk;
        }

        if (resolvent_cmd->parsed()) {
            json opt = json::object();
            opt["f"] = json::object();
            for (const auto& s : f_specs) {
                const auto eq = s.find('=');
                if (eq == std::string::npos || eq == 0)
                    throw Failure{HN_ERR_INVALID_PARAMETER, "--f expects edge=path, got '" + s + "'"};
                opt["f"][s.substr(0, eq)] = s.substr(eq + 1);
            }
            if (!g_spec.empty()) opt["g"] = inline_or_file(g_spec);
            if (cells > 0) opt["cells"] = cells;
            const std::string opt_text = opt.dump();
            Owned out;
            check(hn_resolvent(sys.h, opt_text.c_str(), out_dir.c_str(), &out.p));
            print(out.str());
            return kExitOk;
        }

        if (simulate_cmd->parsed()) {
            json opt = json::object();
            opt["seed"] = seed;
            if (cells > 0) opt["cells"] = cells;
            if (t_final) opt["t_final"] = *t_final;
            if (dt) opt["dt"] = *dt;
            if (cfl) opt["cfl"] = *cfl;
            if (outputs) opt["outputs"] = *outputs;
            if (!method.empty()) opt["method"] = method;
            if (!initial.empty()) opt["initial"] = inline_or_file(initial);
            const std::string opt_text = opt.dump();
            Owned out;
            check(hn_simulate(sys.h, opt_text.c_str(), out_dir.c_str(), &out.p));
            print(out.str());
            return kExitOk;
        }

        if (qual_cmd->parsed()) {
            json opt = {{"property", property}, {"dynamic", !no_dynamic}, {"trials", trials}, {"seed", seed}};
            if (cells > 0) opt["cells"] = cells;
            const std::string opt_text = opt.dump();
            Owned out;
            check(hn_qual(sys.h, opt_text.c_str(), &out.p));
            print(out.str());
            const json rep = json::parse(out.str());
            bool ok = rep.at("static_verdict").get<std::string>() == "certified";
            if (rep.contains("dynamic_verdict"))
                ok = ok && rep.at("dynamic_verdict").at("verdict").get<std::string>() != "violated";
            return strict && !ok ? kExitVerdict : kExitOk;
        }
    } catch (const Failure& f) {
        std::cerr << "hypnet: " << hn_status_name(f.status) << ": " << f.message << '\n';
        return kExitInput;
    } catch (const json::exception& e) {
        std::cerr << "hypnet: ConfigParseError: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitOk;
}
