#pragma once

#include <stdexcept>
#include <string>

namespace roadgraph {

/// Stable short codes surfaced by the CLI for scripting.
enum class ErrorCode {
    Io,        // E_IO
    Format,    // E_FORMAT
    Shape,     // E_SHAPE
    Contract,  // E_CONTRACT
    Numeric,   // E_NUMERIC
    Usage,     // E_USAGE
};

const char* errorCodeName(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
    if (!condition) throw Error(code, message);
}

}  // namespace roadgraph
