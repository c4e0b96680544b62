#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace chaostune {

enum class ErrorCode {
    SingularMass,
    GainDegenerate,
    DimensionMismatch,
    DegenerateBatch,
    EmptyDataset,
    Untrained,
    UnknownTarget,
    TooSmall,
    EmptyInput,
    IoFailure,
    ParseFailure,
    ConfigError,
    InvalidArgument,
};

[[nodiscard]] std::string_view to_string(ErrorCode code) noexcept;

/// Library-wide exception. `code()` lets callers branch without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace chaostune
