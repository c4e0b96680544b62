#include "chaostune/error.hpp"

namespace chaostune {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::SingularMass: return "SingularMass";
        case ErrorCode::GainDegenerate: return "GainDegenerate";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::DegenerateBatch: return "DegenerateBatch";
        case ErrorCode::EmptyDataset: return "EmptyDataset";
        case ErrorCode::Untrained: return "Untrained";
        case ErrorCode::UnknownTarget: return "UnknownTarget";
        case ErrorCode::TooSmall: return "TooSmall";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::ParseFailure: return "ParseFailure";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

}  // namespace chaostune
