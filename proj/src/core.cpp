#include "hypnet/core.hpp"

namespace hypnet {

const char* error_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::Ok: return "Ok";
        case ErrorCode::NonPositiveLength: return "NonPositiveLength";
        case ErrorCode::SelfLoop: return "SelfLoop";
        case ErrorCode::DanglingEndpoint: return "DanglingEndpoint";
        case ErrorCode::ZeroFiberDimension: return "ZeroFiberDimension";
        case ErrorCode::UnknownVertex: return "UnknownVertex";
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::RankDeficientInput: return "RankDeficientInput";
        case ErrorCode::SingularBoundarySystem: return "SingularBoundarySystem";
        case ErrorCode::DomainViolation: return "DomainViolation";
        case ErrorCode::GridTooCoarse: return "GridTooCoarse";
        case ErrorCode::BlowupDetected: return "BlowupDetected";
        case ErrorCode::DimensionTooLargeForExpm: return "DimensionTooLargeForExpm";
        case ErrorCode::WeightNotDiagonal: return "WeightNotDiagonal";
        case ErrorCode::WeightNotIdentity: return "WeightNotIdentity";
        case ErrorCode::ConfigParseError: return "ConfigParseError";
        case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

}  // namespace hypnet
