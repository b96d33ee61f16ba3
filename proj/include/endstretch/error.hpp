#pragma once

#include <stdexcept>
#include <string>

namespace endstretch {

// Numeric values match es_status in endstretch.h.
enum class ErrorCode {
    invalid_input = 1,
    precondition = 2,
    convergence = 3,
    verification = 4,
    internal = 5,
    io = 6,
    parse = 7,
    schema_version = 8,
    missing_data = 9,
};

const char* error_code_name(ErrorCode code) noexcept;

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

}  // namespace endstretch
