#include "vlcmux/error.hpp"

namespace vlcmux {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidSetup: return "invalid-setup";
        case ErrorCode::ConfigInvalid: return "config-invalid";
        case ErrorCode::BlockTooShort: return "block-too-short";
        case ErrorCode::WrongPayloadLength: return "wrong-payload-length";
        case ErrorCode::EmptyTable: return "empty-table";
        case ErrorCode::LengthMismatch: return "length-mismatch";
        case ErrorCode::InvalidPixel: return "invalid-pixel";
        case ErrorCode::WrongPhase: return "wrong-phase";
        case ErrorCode::EmptyCandidates: return "empty-candidates";
        case ErrorCode::ZeroExpected: return "zero-expected";
        case ErrorCode::ScenarioInvalid: return "scenario-invalid";
        case ErrorCode::ParseError: return "parse-error";
        case ErrorCode::SchemaVersionMismatch: return "schema-version-mismatch";
    }
    return "unknown";
}

}  // namespace vlcmux
