#include "segunc/error.hpp"

namespace segunc {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::TrailingData: return "TrailingData";
    case ErrorCode::DimensionOverflow: return "DimensionOverflow";
    case ErrorCode::InvalidDimensions: return "InvalidDimensions";
    case ErrorCode::ValueOutOfRange: return "ValueOutOfRange";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ModeShapeMismatch: return "ModeShapeMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ConfigMismatch: return "ConfigMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::MissingMask: return "MissingMask";
    case ErrorCode::UnreadableImage: return "UnreadableImage";
    case ErrorCode::MissingPreference: return "MissingPreference";
    case ErrorCode::InvalidPreference: return "InvalidPreference";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::OrphanFile: return "OrphanFile";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

} // namespace segunc
