#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "hypnet/models.hpp"
#include "hypnet/qualinv.hpp"
#include "hypnet/system.hpp"
#include "hypnet/wellposed.hpp"

namespace hypnet::config {

using json = nlohmann::json;

struct SimulationSection {
    int cells = 64;
    double t_final = 1.0;
    int outputs = 10;
    std::string method = "rk4";
    double dt = 0.0;
    double cfl = 0.4;
    json initial;  // null: random smooth state in the domain
};

struct ConfigDocument {
    HyperbolicSystem system;
    SimulationSection simulation;
};

// Tolerance overrides by short name (sym, sub, det, rank, eig, proj); they win over the document.
using ToleranceOverrides = std::map<std::string, double>;

ConfigDocument parse(const json& doc, const ToleranceOverrides& overrides = {});
// Parses text; syntax errors report line and column.
ConfigDocument parse_text(const std::string& text, const ToleranceOverrides& overrides = {});
ConfigDocument load_file(const std::string& path, const ToleranceOverrides& overrides = {});

json dump_system(const HyperbolicSystem& sys, const SimulationSection* sim = nullptr);

Tolerances apply_overrides(Tolerances tol, const ToleranceOverrides& overrides);

json to_json(const ValidationReport& r);
json to_json(const BasisConditionResult& r);
json to_json(const ClassificationReport& r);
json to_json(const QualReport& r);
json to_json(const std::vector<ModelInfo>& models);

// Non-finite numbers become the strings "inf", "-inf" or "nan".
json number(double v);

}  // namespace hypnet::config
