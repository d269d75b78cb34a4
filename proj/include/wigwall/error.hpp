#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wigwall {

enum class ErrorKind {
    InvalidArgument,
    GridMismatch,
    LengthMismatch,
    DomainTooSmall,
    NyquistViolation,
    SupportEscaped,
    RealnessViolation,
    BadInterval,
    AsymmetricIndicator,
    EmptyInterior,
    TruncationTooSevere,
    ConfigError,
    IoError,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::GridMismatch: return "GridMismatch";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::DomainTooSmall: return "DomainTooSmall";
        case ErrorKind::NyquistViolation: return "NyquistViolation";
        case ErrorKind::SupportEscaped: return "SupportEscaped";
        case ErrorKind::RealnessViolation: return "RealnessViolation";
        case ErrorKind::BadInterval: return "BadInterval";
        case ErrorKind::AsymmetricIndicator: return "AsymmetricIndicator";
        case ErrorKind::EmptyInterior: return "EmptyInterior";
        case ErrorKind::TruncationTooSevere: return "TruncationTooSevere";
        case ErrorKind::ConfigError: return "ConfigError";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

/// Guards that trip because the discretization cannot represent the state,
/// as opposed to malformed input. The CLI maps these to exit code 3.
constexpr bool is_numerical_guard(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::DomainTooSmall:
        case ErrorKind::NyquistViolation:
        case ErrorKind::SupportEscaped:
        case ErrorKind::RealnessViolation:
        case ErrorKind::TruncationTooSevere:
            return true;
        default:
            return false;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& what) {
    if (!condition) throw Error(kind, what);
}

}  // namespace wigwall
