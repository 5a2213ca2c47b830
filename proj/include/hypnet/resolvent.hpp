#pragma once

#include "hypnet/state.hpp"

namespace hypnet {

// Full: edges M u' + N u, vertices B trace + C x.  Reduced: N = 0 and C replaced by -P^(d,0).
enum class OperatorKind { Full, Reduced };

// Rows are the adjoints of the extended spanning vectors (Y-perp, B* Ran B, Ker B* in Yd) of all blocks.
struct BoundaryProblem {
    Mat matrix;  // count x k
    struct Row {
        int block = 0;
        enum Kind { Stationary, RangeBstar, KernelBstar } kind = Stationary;
        Vec w;  // trace-space vector of the block
        Vec y;  // for RangeBstar rows: the Ran B vector with w = B* y
    };
    std::vector<Row> rows;
};

BoundaryProblem boundary_problem(const HyperbolicSystem& sys);

struct ResolventSolution {
    StateVector state;
    double condition = 0;
    double boundary_residual = 0;  // max-abs residual of the k x k system
};

// Solves the reduced operator equal to (f, g); f[e] holds samples at uniform nodes (k_e x (m_e + 1)),
// g holds Yd coordinates. Throws SingularBoundarySystem.
ResolventSolution solve_A0(const HyperbolicSystem& sys, const std::vector<Mat>& f, const Vec& g);

// Edge derivative from samples by fourth-order differences (needs >= 4 cells per edge).
std::vector<Mat> differentiate(const HyperbolicSystem& sys, const std::vector<Mat>& u);

// Throws DomainViolation when the traces leave Y or x differs from the Yd part of the trace.
StateVector apply_A(const HyperbolicSystem& sys, const StateVector& s, OperatorKind kind = OperatorKind::Full);
StateVector apply_A(const HyperbolicSystem& sys, const StateVector& s, const std::vector<Mat>& du,
                    OperatorKind kind = OperatorKind::Full);

double d_norm(const HyperbolicSystem& sys, const StateVector& s);

}  // namespace hypnet
