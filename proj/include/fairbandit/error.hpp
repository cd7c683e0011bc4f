#pragma once

#include <stdexcept>
#include <string>

namespace fairbandit {

enum class ErrorCode {
    DimensionMismatch,
    InvalidArgument,
    ZeroCount,
    ZeroReward,
    NonFinite,
    Infeasible,
    GridTooLarge,
    Config,
    Io,
};

const char* to_string(ErrorCode code) noexcept;

/// Structured error carrying a machine-readable code alongside the message.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace fairbandit
