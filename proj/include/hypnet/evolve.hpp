#pragma once

#include <Eigen/Sparse>

#include "hypnet/state.hpp"

namespace hypnet {

using SpMat = Eigen::SparseMatrix<cplx>;

// Nodal vector layout: per edge, nodes 0..n_e with k_e components each, then all vertex coordinates.
// Reduced coordinates: interior nodes of every edge, then one coefficient vector per block in its Y basis.
struct DiscreteGenerator {
    std::vector<int> cells;
    std::vector<int> node_offset;
    int nodal_dim = 0;
    int reduced_dim = 0;
    int x_start = 0;
    SpMat Afull;  // nodal operator before elimination
    SpMat W;      // nodal weight (trapezoid x Q_e, vertex Gram blocks)
    SpMat Z;      // reduced -> nodal
    SpMat G;      // Z* W Z
    SpMat A;      // G^-1 Z* W Afull Z

    Vec to_nodal(const StateVector& s) const;
    StateVector from_nodal(const Vec& v, const HyperbolicSystem& sys) const;
    // W-orthogonal projection onto the constrained space; defect is relative in the weighted norm.
    Vec reduce(const StateVector& s, double* defect = nullptr) const;
    StateVector expand(const Vec& r, const HyperbolicSystem& sys) const;
    double energy(const Vec& r) const;
};

// Summation-by-parts differences (second order inside, first order closure), constraints eliminated exactly.
DiscreteGenerator assemble_discrete_generator(const HyperbolicSystem& sys, const std::vector<int>& cells);

// Nodal action of the adjoint operator (edge part and vertex part), same layout as Afull.
SpMat assemble_adjoint_nodal(const HyperbolicSystem& sys, const DiscreteGenerator& gen);

enum class Method { RK4, Expm };

struct SimulationOptions {
    double t_final = 1.0;
    int outputs = 10;
    Method method = Method::RK4;
    double dt = 0.0;  // 0: CFL-limited for rk4, output interval for expm
    double cfl = 0.4;
    bool keep_states = true;
};

struct Trajectory {
    std::vector<double> t;
    std::vector<StateVector> states;
    std::vector<double> energy;
    std::vector<double> constraint_residual;
    double projection_defect = 0;  // of the initial data
    int reprojections = 0;
    double dt = 0;
    long steps = 0;
    std::vector<std::string> warnings;
};

Trajectory simulate(const HyperbolicSystem& sys, const DiscreteGenerator& gen, const StateVector& initial,
                    const SimulationOptions& opt);

struct DissipationCheck {
    double lhs = 0;  // Re((A - lambda) u, u)_d
    double rhs = 0;  // half the edge, boundary and vertex forms, minus lambda |u|^2
    double residual = 0;
};

// Both sides by the same trapezoid rule with exact derivatives of a smooth state in the domain.
DissipationCheck dissipativity_residual(const HyperbolicSystem& sys, const SmoothState& u, const std::vector<int>& cells,
                                        double lambda = 0.0);

struct AdjointCheck {
    double defect = 0;      // |<A_h u, v>_d - <u, A* v>_d| with A* applied exactly at the nodes
    double sbp_defect = 0;  // |<Afull u, v>_W - <u, Afull* v>_W| for the nodal pair
    double scale = 0;       // |u|_d |v|_d
};

AdjointCheck adjoint_consistency(const HyperbolicSystem& sys, const DiscreteGenerator& gen, const SmoothState& u,
                                 const SmoothState& v);

// Relative norm of A_h + A_h^dagger, the adjoint taken in the discrete weighted inner product.
double skew_defect(const DiscreteGenerator& gen);

// Exact adjoint action sampled at the nodes of a smooth state.
StateVector apply_adjoint_exact(const HyperbolicSystem& sys, const SmoothState& v, const std::vector<int>& cells);

}  // namespace hypnet
