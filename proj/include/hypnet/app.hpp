#pragma once

#include <map>
#include <optional>
#include <string>

#include "hypnet/config.hpp"
#include "hypnet/evolve.hpp"

namespace hypnet::app {

using json = nlohmann::json;

json run_check(const HyperbolicSystem& sys);
// With lambda (mu) set, also reports the boundary (adjoint) cone at that shift for every block.
json run_classify(const HyperbolicSystem& sys, std::optional<double> lambda = {}, std::optional<double> mu = {});

struct QualRequest {
    Property property = Property::Real;
    bool dynamic = true;
    ProbeOptions probe;
};
json run_qual(const HyperbolicSystem& sys, const QualRequest& req);

// Initial data description: null or {"kind": "random", "real": bool}, {"kind": "zero"}, or
// {"kind": "smooth", "edges": {id: {"left": v, "right": v, "bump": [v, ...]}}, "x": v}.
SmoothState initial_state(const HyperbolicSystem& sys, const json& spec, unsigned long long seed);

struct SimulateRequest {
    config::SimulationSection sim;
    unsigned long long seed = 0;
    std::string out_dir;  // empty: no files
};
// Writes energy.csv, boundary.csv and edge_<id>.csv; returns a summary.
json run_simulate(const HyperbolicSystem& sys, const SimulateRequest& req);

struct ResolventRequest {
    std::map<std::string, std::string> f_files;  // edge id -> CSV (x, re_0, im_0, ...)
    json g;                                      // vertex right-hand side, null for zero
    int cells = 64;                              // grid for edges without a file
    std::string out_dir;
};
json run_resolvent(const HyperbolicSystem& sys, const ResolventRequest& req);

json models_list();
json model_dump(const std::string& name, const json& params);

// Rows of numbers from a CSV file with one header line.
std::vector<std::vector<double>> read_csv(const std::string& path);

}  // namespace hypnet::app
