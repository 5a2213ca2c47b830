#pragma once

#include <random>
#include <vector>

#include "hypnet/system.hpp"

namespace hypnet {

// Edge samples plus vertex coordinates. u[e] is k_e x (n_e + 1); column j sits at x_j = j l_e / n_e.
// x holds the coordinates of each block's Yd part in its orthonormal basis, blocks in order.
struct StateVector {
    std::vector<Mat> u;
    Vec x;
};

std::vector<int> uniform_cells(const HyperbolicSystem& sys, int n);
StateVector zero_state(const HyperbolicSystem& sys, const std::vector<int>& cells);
std::vector<int> cells_of(const StateVector& s);

// Start of block b inside StateVector::x.
int x_offset(const HyperbolicSystem& sys, int block);

// Trace of the sampled edge part at a block, in the block's slot layout.
Vec block_trace(const HyperbolicSystem& sys, const std::vector<Mat>& u, int block);

// Gram matrix Yd* Q Yd of a block.
Mat vertex_gram(const ConditionBlock& b);

// Weighted inner product: trapezoid with Q_e at nodes plus x* (Yd* Q Yd) y.
cplx inner_d(const HyperbolicSystem& sys, const StateVector& a, const StateVector& b);
double energy(const HyperbolicSystem& sys, const StateVector& s);

StateVector operator+(const StateVector& a, const StateVector& b);
StateVector operator-(const StateVector& a, const StateVector& b);
StateVector operator*(cplx s, const StateVector& a);

// Max over blocks of |(I - P_Y) trace| and |x - Yd* trace|.
double constraint_residual(const HyperbolicSystem& sys, const StateVector& s);

// Smooth edge function: linear blend of endpoint values plus s(1-s) times a short sine series.
// With power p > 0 mode m is sin^p(pi s) cos(m pi s) instead, flat to order p - 1 at both ends.
struct SmoothEdge {
    double length = 1.0;
    Vec left, right;
    std::vector<Vec> bump;
    int power = 0;
    Vec value(double x) const;
    Vec derivative(double x) const;
};

struct SmoothState {
    std::vector<SmoothEdge> edges;
    Vec x;  // coordinates as in StateVector
    StateVector sample(const std::vector<int>& cells) const;
    std::vector<Mat> sample_derivative(const std::vector<int>& cells) const;
};

// Endpoint values assembled from per-block traces (each edge end belongs to one block).
SmoothState smooth_from_traces(const HyperbolicSystem& sys, const std::vector<Vec>& traces, const Vec& x,
                               std::mt19937_64& rng, int modes = 3);

// Random smooth state in the operator domain: traces in Y, x = Yd* trace.
SmoothState random_domain_state(const HyperbolicSystem& sys, std::mt19937_64& rng, bool real = false);

// Random smooth state whose (trace, x) pairs lie in the adjoint trace space of every block.
SmoothState random_adjoint_state(const HyperbolicSystem& sys, std::mt19937_64& rng);

}  // namespace hypnet
