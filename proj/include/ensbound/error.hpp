#pragma once

#include <stdexcept>
#include <string>

namespace ensbound {

/// Invalid input: bad arguments, inconsistent structures, malformed files.
/// The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An iterative solver failed to converge. The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

[[noreturn]] inline void fail(const std::string& what) { throw ValidationError(what); }

inline void require(bool ok, const std::string& what) {
    if (!ok) fail(what);
}

}  // namespace ensbound
