#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hypnet/state.hpp"

namespace hypnet {

enum class Property { Real, Positive, Linf };
enum class ConvexSet { Reals, Nonneg, UnitBall };

const char* property_name(Property p);
Property parse_property(const std::string& s);

struct QualCondition {
    std::string name;
    bool pass = true;
    double value = 0.0;  // worst violation measured, 0 when exact
    std::string detail;
    bool sampled = false;
};

struct DynamicVerdict {
    bool violated = false;
    double t = 0.0;                 // time of the worst corrected excursion
    double magnitude = 0.0;         // worst fine-grid excursion minus the coarse/fine difference
    double raw_excursion = 0.0;     // worst excursion on the fine grid
    double min_value = 0.0;         // positivity: corrected minimum of the real parts
    int trials = 0;
    int cells = 0;
};

struct QualReport {
    Property property = Property::Real;
    bool certified = false;
    std::vector<QualCondition> conditions;
    std::vector<std::string> failed_conditions;
    std::vector<std::string> notes;
    std::optional<DynamicVerdict> dynamic;
};

// Nearest point in the weighted norm: Re, positive part, or radial clamp, conjugated by the weights.
// Vertex coordinates act on their ambient value Yd x.
StateVector minimizing_projector(const HyperbolicSystem& sys, const StateVector& s, ConvexSet set);

QualReport check_real(const HyperbolicSystem& sys);
QualReport check_positive(const HyperbolicSystem& sys, int samples = 1000, unsigned long long seed = 0);
QualReport check_linf(const HyperbolicSystem& sys, int samples = 1000, unsigned long long seed = 0);
QualReport check_property(const HyperbolicSystem& sys, Property p, unsigned long long seed = 0);

struct ProbeOptions {
    int trials = 20;
    int cells = 32;  // the fine grid has twice as many
    double t_final = 1.0;
    int outputs = 20;
    unsigned long long seed = 0;
    double threshold = 1e-6;
};

// Evolves random initial states inside the convex set on two grids and measures the excursion out of it.
DynamicVerdict dynamic_probe(const HyperbolicSystem& sys, Property p, const ProbeOptions& opt = {});

}  // namespace hypnet
