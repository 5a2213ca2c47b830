#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hypnet/system.hpp"

namespace hypnet {

struct ParamSchema {
    std::string name;
    std::string type;
    nlohmann::json default_value;
    std::string constraint;
};

struct ModelInfo {
    std::string name;
    std::string description;
    std::vector<ParamSchema> params;
};

struct ModelPreset {
    std::string name;
    nlohmann::json params;  // defaults merged with the caller's values
    HyperbolicSystem system;
    std::string expected_verdict;
    std::string expected_route;
};

std::vector<ModelInfo> list_models();

// Throws InvalidParameter for unknown names, unknown keys, or out-of-range values.
ModelPreset instantiate(const std::string& name, const nlohmann::json& params = nlohmann::json::object());

}  // namespace hypnet
