#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "hypnet/linalg.hpp"
#include "hypnet/models.hpp"
#include "hypnet/system.hpp"
#include "hypnet/wellposed.hpp"

namespace testsupport {

using namespace hypnet;

inline HyperbolicSystem preset(const std::string& name, const nlohmann::json& params = nlohmann::json::object()) {
    return instantiate(name, params).system;
}

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"transport",    "maxwell_two_intervals", "telegrapher_y",
                                                "second_sound", "wave_star",             "dirac_network"};
    return names;
}

// Least-squares slope of -log(err) against log(n).
inline double observed_order(const std::vector<int>& n, const std::vector<double>& err) {
    const int m = static_cast<int>(n.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < m; ++i) {
        const double x = std::log(double(n[i])), y = -std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

// Hermitian positive definite Q and M = Q^-1 S with S Hermitian and eigenvalues of modulus in [0.5, 2].
inline EdgeCoefficients random_edge(std::mt19937_64& rng, int k) {
    std::uniform_real_distribution<double> mag(0.5, 2.0);
    std::bernoulli_distribution sign(0.5);
    Mat A = la::random_matrix(rng, k, k);
    Mat Q = A * A.adjoint() / double(k) + Mat::Identity(k, k);
    Mat U = la::orth(la::random_matrix(rng, k, k), 1e-12);
    Vec d(k);
    for (int i = 0; i < k; ++i) d(i) = (sign(rng) ? 1.0 : -1.0) * mag(rng);
    Mat S = U * d.asDiagonal() * U.adjoint();
    EdgeCoefficients c;
    c.Q = MatrixField(Q);
    c.M = MatrixField(Mat(Q.inverse() * S));
    c.N = MatrixField(Mat(0.3 * la::random_matrix(rng, k, k)));
    return c;
}

// Triangle plus one chord-free extra edge; random Y_v, Yd_v inside Y_v and a generic B_v, sized so the
// number of boundary conditions equals k.
inline HyperbolicSystem random_basis_system(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> dim(1, 2);
    std::uniform_real_distribution<double> len(0.5, 1.5);
    GraphSpec gs;
    gs.vertices = {"a", "b", "c", "d"};
    gs.edges = {{"e1", "a", "b", len(rng), dim(rng)},
                {"e2", "b", "c", len(rng), dim(rng)},
                {"e3", "a", "c", len(rng), dim(rng)},
                {"e4", "c", "d", len(rng), dim(rng)}};
    MetricGraph g = MetricGraph::build(gs);
    std::vector<EdgeCoefficients> coeffs;
    for (const auto& e : g.edges()) coeffs.push_back(random_edge(rng, e.dim));

    // Each vertex contributes n_v - dim Y_v + dim Yd_v conditions; choose dim Y_v - dim Yd_v = r_v with sum k.
    const int nv = g.num_vertices();
    std::vector<int> r(nv);
    int total = 0;
    for (int v = 0; v < nv; ++v) total += (r[v] = g.kv(v) / 2);
    for (int v = 0; total < g.k(); v = (v + 1) % nv)
        if (r[v] < g.kv(v)) ++r[v], ++total;

    std::vector<ConditionInput> inputs;
    for (int v = 0; v < nv; ++v) {
        const int n = g.kv(v);
        std::uniform_int_distribution<int> dd_pick(0, n - r[v]);
        const int dd = dd_pick(rng);
        const int dy = r[v] + dd;
        ConditionInput in;
        in.Y_span = la::random_matrix(rng, n, dy);
        in.Yd_span = *in.Y_span * la::random_matrix(rng, dy, dd);
        in.B = la::random_matrix(rng, n, n);
        in.C = la::random_matrix(rng, n, n);
        inputs.push_back(in);
    }
    return make_system(std::move(g), std::move(coeffs), ConditionMode::Local, inputs);
}

// Draws until the basis condition holds; returns the number of rejected draws through `rejected`.
inline HyperbolicSystem random_valid_basis_system(std::mt19937_64& rng, int* rejected = nullptr) {
    int rej = 0;
    for (;;) {
        HyperbolicSystem sys = random_basis_system(rng);
        if (basis_condition(sys).holds) {
            if (rejected) *rejected = rej;
            return sys;
        }
        ++rej;
    }
}

}  // namespace testsupport
