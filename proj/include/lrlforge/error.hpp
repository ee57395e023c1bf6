#pragma once

#include <stdexcept>
#include <string>

namespace lrlforge {

// Domain error carrying a module-qualified code, e.g. "corpus/zero-records".
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

// Bad arguments or unusable input (maps to CLI exit 2 when raised at parse time).
class UsageError : public Error {
public:
    using Error::Error;
};

}  // namespace lrlforge
