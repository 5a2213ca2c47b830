#pragma once

#include "hypnet/core.hpp"

namespace hypnet::la {

// Singular values at or below rel_tol * max(s_max, floor) count as zero; floor = 1 makes
// near-zero matrices rank zero instead of amplifying roundoff.
int rank(const Mat& a, double rel_tol, double floor = 0.0);

// Orthonormal basis of the column span.
Mat orth(const Mat& a, double rel_tol, double floor = 0.0);

// Orthonormal basis of the kernel. Columns = a.cols() - rank.
Mat null_space(const Mat& a, double rel_tol, double floor = 0.0);

// Orthonormal basis of the orthogonal complement of span(basis) in C^n.
Mat complement(const Mat& basis, int n);

// Re-orthonormalise user-supplied spanning columns; throws RankDeficientInput.
Mat orthonormalize_strict(const Mat& span, double rel_tol, const std::string& what);

inline Mat herm(const Mat& a) { return 0.5 * (a + a.adjoint()); }

// ||A - A*||_F / max(1, ||A||_F)
double rel_asymmetry(const Mat& a);

// ||Im A||_F / max(1, ||A||_F)
double rel_imag(const Mat& a);

// max over rows/cols of |off-diagonal| relative to max(1, ||A||_F)
double rel_offdiag(const Mat& a);

// Residual of span(sub) inside span(sup): ||(I - P_sup) sub||_F for orthonormal inputs.
double subspace_residual(const Mat& sub, const Mat& sup);

// Symmetric distance between two subspaces given orthonormal bases.
double subspace_distance(const Mat& a, const Mat& b);

// Eigen-decomposition of Hermitian part; ascending eigenvalues.
RVec herm_eigenvalues(const Mat& a);

// Principal square root of a Hermitian positive semidefinite matrix and its pseudo-inverse.
Mat psd_sqrt(const Mat& a);
Mat psd_sqrt_pinv(const Mat& a, double rel_tol);

// Random helpers seeded by caller.
template <class Rng>
Mat random_matrix(Rng& rng, int rows, int cols);

}  // namespace hypnet::la

#include <random>

namespace hypnet::la {
template <class Rng>
Mat random_matrix(Rng& rng, int rows, int cols) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = cplx(nd(rng), nd(rng));
    return m;
}
}  // namespace hypnet::la
