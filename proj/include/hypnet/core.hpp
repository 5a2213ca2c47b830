#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace hypnet {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

enum class ErrorCode {
    Ok = 0,
    NonPositiveLength,
    SelfLoop,
    DanglingEndpoint,
    ZeroFiberDimension,
    UnknownVertex,
    InvalidParameter,
    RankDeficientInput,
    SingularBoundarySystem,
    DomainViolation,
    GridTooCoarse,
    BlowupDetected,
    DimensionTooLargeForExpm,
    WeightNotDiagonal,
    WeightNotIdentity,
    ConfigParseError,
    Internal,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

struct Tolerances {
    double sym = 1e-10;
    double sub = 1e-10;
    double det = 1e-12;
    double rank = 1e-9;
    double eig = 1e-10;
    double proj = 1e-9;
};

}  // namespace hypnet
