#pragma once

#include <stdexcept>
#include <string>

namespace eegsz {

// Broad failure classes; the CLI maps these onto its exit codes and the
// C API onto status codes.
enum class ErrorKind {
    Config = 2,   // bad parameters, shape mismatches, invalid specs
    Data = 3,     // malformed files, degenerate inputs, parse failures
    Numeric = 4,  // divergence, non-finite values
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void throw_config(const std::string& msg) { throw Error(ErrorKind::Config, msg); }
[[noreturn]] inline void throw_data(const std::string& msg) { throw Error(ErrorKind::Data, msg); }
[[noreturn]] inline void throw_numeric(const std::string& msg) { throw Error(ErrorKind::Numeric, msg); }

} // namespace eegsz
