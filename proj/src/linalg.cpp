#include "hypnet/linalg.hpp"

#include <Eigen/SVD>
#include <Eigen/Eigenvalues>
#include <algorithm>

namespace hypnet::la {

namespace {
int rank_from(const RVec& s, double rel_tol, double floor = 0.0) {
    if (s.size() == 0) return 0;
    const double smax = s(0);
    if (smax == 0.0) return 0;
    const double thr = rel_tol * std::max(smax, floor);
    int r = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > thr) ++r;
    return r;
}
}  // namespace

int rank(const Mat& a, double rel_tol, double floor) {
    if (a.size() == 0) return 0;
    Eigen::JacobiSVD<Mat> svd(a);
    return rank_from(svd.singularValues(), rel_tol, floor);
}

Mat orth(const Mat& a, double rel_tol, double floor) {
    if (a.cols() == 0 || a.rows() == 0) return Mat(a.rows(), 0);
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU);
    const int r = rank_from(svd.singularValues(), rel_tol, floor);
    return svd.matrixU().leftCols(r);
}

Mat null_space(const Mat& a, double rel_tol, double floor) {
    const int n = static_cast<int>(a.cols());
    if (n == 0) return Mat(0, 0);
    if (a.rows() == 0) return Mat::Identity(n, n);
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
    const int r = rank_from(svd.singularValues(), rel_tol, floor);
    return svd.matrixV().rightCols(n - r);
}

Mat complement(const Mat& basis, int n) {
    if (basis.cols() == 0) return Mat::Identity(n, n);
    return null_space(basis.adjoint(), 1e-12, 1.0);
}

Mat orthonormalize_strict(const Mat& span, double rel_tol, const std::string& what) {
    if (span.cols() == 0) return Mat(span.rows(), 0);
    Eigen::JacobiSVD<Mat> svd(span, Eigen::ComputeThinU);
    const int r = rank_from(svd.singularValues(), rel_tol);
    if (r < span.cols())
        throw Error(ErrorCode::RankDeficientInput,
                    what + ": spanning vectors are linearly dependent (rank " + std::to_string(r) +
                        " < " + std::to_string(span.cols()) + ")");
    return svd.matrixU().leftCols(r);
}

double rel_asymmetry(const Mat& a) {
    return (a - a.adjoint()).norm() / std::max(1.0, a.norm());
}

double rel_imag(const Mat& a) { return a.imag().norm() / std::max(1.0, a.norm()); }

double rel_offdiag(const Mat& a) {
    double m = 0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (i != j) m = std::max(m, std::abs(a(i, j)));
    return m / std::max(1.0, a.norm());
}

double subspace_residual(const Mat& sub, const Mat& sup) {
    if (sub.cols() == 0) return 0.0;
    if (sup.cols() == 0) return sub.norm();
    return (sub - sup * (sup.adjoint() * sub)).norm();
}

double subspace_distance(const Mat& a, const Mat& b) {
    if (a.cols() != b.cols()) return std::numeric_limits<double>::infinity();
    return std::max(subspace_residual(a, b), subspace_residual(b, a));
}

RVec herm_eigenvalues(const Mat& a) {
    if (a.rows() == 0) return RVec(0);
    Eigen::SelfAdjointEigenSolver<Mat> es(herm(a), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

Mat psd_sqrt(const Mat& a) {
    if (a.rows() == 0) return a;
    Eigen::SelfAdjointEigenSolver<Mat> es(herm(a));
    RVec d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * d.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

Mat psd_sqrt_pinv(const Mat& a, double rel_tol) {
    if (a.rows() == 0) return a;
    Eigen::SelfAdjointEigenSolver<Mat> es(herm(a));
    RVec ev = es.eigenvalues();
    const double emax = std::max(ev.cwiseAbs().maxCoeff(), 0.0);
    RVec d(ev.size());
    for (int i = 0; i < ev.size(); ++i) d(i) = ev(i) > rel_tol * emax && ev(i) > 0 ? 1.0 / std::sqrt(ev(i)) : 0.0;
    return es.eigenvectors() * d.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace hypnet::la
