#include "klab/error.hpp"

namespace klab {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::UnbalancedParen: return "UnbalancedParen";
        case ErrorKind::UnknownIdentifier: return "UnknownIdentifier";
        case ErrorKind::UnexpectedToken: return "UnexpectedToken";
        case ErrorKind::EmptyInput: return "EmptyInput";
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::GridMismatch: return "GridMismatch";
        case ErrorKind::InvalidGrid: return "InvalidGrid";
        case ErrorKind::FieldFormat: return "FieldFormat";
        case ErrorKind::NonPositiveWeight: return "NonPositiveWeight";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::NonPositiveCoefficient: return "NonPositiveCoefficient";
        case ErrorKind::NegativeS: return "NegativeS";
        case ErrorKind::SingularJacobian: return "SingularJacobian";
        case ErrorKind::CheckFailed: return "CheckFailed";
        case ErrorKind::NotInAdmissibleSet: return "NotInAdmissibleSet";
        case ErrorKind::SignChange: return "SignChange";
        case ErrorKind::ZeroDenominator: return "ZeroDenominator";
        case ErrorKind::ConstantC: return "ConstantC";
        case ErrorKind::NonPositiveC: return "NonPositiveC";
        case ErrorKind::ConstructionFailed: return "ConstructionFailed";
        case ErrorKind::Config: return "Config";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

}  // namespace klab
