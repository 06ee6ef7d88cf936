#pragma once

#include <stdexcept>
#include <string>

namespace ecgres {

// Coarse error classes. These map one-to-one onto the C API status values
// and onto CLI exit codes, so keep the numbering stable.
enum class ErrorCode : int {
    Config = 2,   // bad or inconsistent configuration
    Io = 3,       // filesystem / OS failures
    Format = 4,   // malformed or unsupported input files
    Data = 5,     // valid files but unusable content (empty pools, gaps, ...)
    Numeric = 6,  // singular systems, failed searches, runaway dynamics
    Stale = 7,    // pipeline artifact hash mismatch
    Internal = 8,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg)
        : std::runtime_error(msg), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

const char* error_code_name(ErrorCode code);

} // namespace ecgres
