#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace segunc {

// Machine-greppable failure categories. The CLI prints them as `error[Name]`.
enum class ErrorCode {
    BadMagic,
    UnsupportedVersion,
    TruncatedFile,
    TrailingData,
    DimensionOverflow,
    InvalidDimensions,
    ValueOutOfRange,
    IoFailure,
    UnsupportedFormat,
    ShapeMismatch,
    ModeShapeMismatch,
    IndexOutOfRange,
    DomainError,
    InvalidConfig,
    ConfigMismatch,
    EmptyInput,
    MissingMask,
    UnreadableImage,
    MissingPreference,
    InvalidPreference,
    InvalidSpec,
    OrphanFile,
    ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every validation failure in the library throws this. Internal bugs surface as
// other std::exception types.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace segunc
