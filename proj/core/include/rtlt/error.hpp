#pragma once

#include <stdexcept>
#include <string>

namespace rtlt {

/// Base of every error raised by the library. `module()` names the stage that
/// failed so the CLI can print "<module>: <message>".
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& message)
        : std::runtime_error(module + ": " + message), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

/// Error carrying a module-specific kind enum.
template <typename Kind>
class KindedError : public Error {
public:
    KindedError(std::string module, Kind kind, const std::string& message)
        : Error(std::move(module), message), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

}  // namespace rtlt
