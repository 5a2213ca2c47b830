#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hypnet/netgraph.hpp"

namespace hypnet {

// Constant matrix, or samples at m+1 uniform nodes over an edge with linear interpolation.
class MatrixField {
public:
    MatrixField() = default;
    explicit MatrixField(Mat constant) : samples_{std::move(constant)} {}
    explicit MatrixField(std::vector<Mat> samples);

    bool is_constant() const { return samples_.size() == 1; }
    int segments() const { return static_cast<int>(samples_.size()) - 1; }
    int rows() const { return samples_.empty() ? 0 : static_cast<int>(samples_[0].rows()); }
    int cols() const { return samples_.empty() ? 0 : static_cast<int>(samples_[0].cols()); }
    const std::vector<Mat>& samples() const { return samples_; }
    bool empty() const { return samples_.empty(); }

    // s in [0, 1] is the relative position along the edge.
    Mat at(double s) const;
    // d/ds of the interpolant; right-sided except at s = 1.
    Mat slope(double s) const;

private:
    std::vector<Mat> samples_;
};

struct EdgeCoefficients {
    MatrixField M;
    MatrixField N;
    MatrixField Q;
    std::optional<MatrixField> dQM;  // exact derivative of Q M in x, if supplied
};

enum class ConditionMode { Local, Global };

// User-facing vertex data, ambient in the block's trace space.
struct ConditionInput {
    std::optional<Mat> Y_span;  // columns; absent means the whole space
    Mat Yd_span;                // columns; may have zero columns
    std::optional<Mat> B;
    std::optional<Mat> C;
    std::optional<Mat> Q;  // absent means identity on Yd
};

// A set of trace slots sharing one condition: a vertex (local mode) or all endpoints (global mode).
struct ConditionBlock {
    std::string name;
    int vertex = -1;
    std::vector<Slot> slots;
    int dim = 0;
    Mat Y;   // orthonormal
    Mat Yd;  // orthonormal, inside Y
    Mat B, C, Q;
    int dd() const { return static_cast<int>(Yd.cols()); }
    Mat Pd() const { return Yd * Yd.adjoint(); }
    Mat PY() const { return Y * Y.adjoint(); }
};

struct HyperbolicSystem {
    MetricGraph graph;
    std::vector<EdgeCoefficients> coeffs;
    ConditionMode mode = ConditionMode::Local;
    std::vector<ConditionBlock> blocks;
    Tolerances tol;
    std::vector<std::string> warnings;

    // Coefficients at physical position x in [0, length].
    Mat M(int e, double x) const;
    Mat N(int e, double x) const;
    Mat Q(int e, double x) const;
    Mat QM(int e, double x) const;
    Mat dQM(int e, double x) const;
    // Uniform check nodes (relative positions) covering all sample nodes of edge e.
    std::vector<double> check_nodes(int e) const;

    int block_of_vertex(int v) const;
    int total_dd() const;
};

std::vector<Slot> global_layout(const MetricGraph& g);

// Builds blocks from inputs (one per vertex in local mode, one in global mode) and compresses B, C, Q.
HyperbolicSystem make_system(MetricGraph graph, std::vector<EdgeCoefficients> coeffs, ConditionMode mode,
                             const std::vector<ConditionInput>& inputs, const Tolerances& tol = {});

struct AssumptionCheck {
    std::string name;
    bool pass = true;
    double value = 0.0;
    std::string location;
};

struct ValidationReport {
    bool ok = true;
    std::vector<AssumptionCheck> checks;
    std::vector<std::string> warnings;
};

ValidationReport validate_assumptions(const HyperbolicSystem& sys);

// Block-diagonal boundary matrix for an arbitrary slot list.
Mat assemble_T(const HyperbolicSystem& sys, const std::vector<Slot>& slots);
Mat assemble_Tv(const HyperbolicSystem& sys, const std::string& vertex);
Mat assemble_T_global(const HyperbolicSystem& sys);
inline Mat assemble_T(const HyperbolicSystem& sys, const ConditionBlock& b) { return assemble_T(sys, b.slots); }

}  // namespace hypnet
