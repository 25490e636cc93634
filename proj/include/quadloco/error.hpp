#pragma once

#include <stdexcept>
#include <string>

namespace quadloco {

enum class Errc {
    EmptyTrace = 1,
    NonMonotonicTimestamps,
    MalformedRecord,
    InvalidParams,
    InsufficientFrames,
    CalibrationUnstable,
    ZeroDt,
    InvalidC,
    InvalidConfig,
    UnknownKey,
    InvalidLevel,
    Io,
    BindFailure,
    MalformedCommand,
    Unsupported,
};

const char* errc_name(Errc code);

// All library failures surface as this exception. `line()` is the 1-based
// source line for parse errors and 0 otherwise.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message, int line = 0)
        : std::runtime_error(message), code_(code), line_(line) {}

    Errc code() const noexcept { return code_; }
    int line() const noexcept { return line_; }

private:
    Errc code_;
    int line_;
};

} // namespace quadloco
