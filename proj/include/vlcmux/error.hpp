#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vlcmux {

enum class ErrorCode {
    InvalidSetup,
    ConfigInvalid,
    BlockTooShort,
    WrongPayloadLength,
    EmptyTable,
    LengthMismatch,
    InvalidPixel,
    WrongPhase,
    EmptyCandidates,
    ZeroExpected,
    ScenarioInvalid,
    ParseError,
    SchemaVersionMismatch,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace vlcmux
