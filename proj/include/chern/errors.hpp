#pragma once

#include <stdexcept>
#include <string>

namespace chern {

// Two failure families. Configuration errors are the caller's fault (bad
// names, out-of-range parameters, inadmissible scale factors); numeric errors
// mean the mathematics refused (degenerate spectra, unresolved grids,
// disagreeing engines). The CLI maps them to exit codes 2 and 3.
enum class ErrorClass { config, numeric };

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, std::string kind, const std::string& message)
        : std::runtime_error(message), cls_(cls), kind_(std::move(kind)) {}

    ErrorClass error_class() const noexcept { return cls_; }
    const std::string& kind() const noexcept { return kind_; }

private:
    ErrorClass cls_;
    std::string kind_;
};

class ConfigError : public Error {
public:
    ConfigError(std::string kind, const std::string& message)
        : Error(ErrorClass::config, std::move(kind), message) {}
};

class NumericError : public Error {
public:
    NumericError(std::string kind, const std::string& message)
        : Error(ErrorClass::numeric, std::move(kind), message) {}
};

}  // namespace chern
