#pragma once

#include <stdexcept>
#include <string>

namespace iota {

// Base error for every pipeline stage. The CLI maps the concrete type to an
// exit code (config 2, store 3, anything else 4).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class StoreError : public Error {
public:
    using Error::Error;
};

class AppSemanticsError : public Error {
public:
    AppSemanticsError(std::string code, const std::string& message)
        : Error(message), code_(std::move(code)) {}

    // Machine-readable diagnostic code, e.g. "no-trigger" or "unmatched-phrase".
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class ProgramError : public Error {
public:
    using Error::Error;
};

class MetricsError : public Error {
public:
    using Error::Error;
};

}  // namespace iota
