#pragma once

#include <stdexcept>
#include <string>

namespace ctxband {

// Bad user input: malformed config, invalid distribution, out-of-range
// parameter. The CLI maps this to exit code 2.
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// Failure while running an experiment (exit code 3).
class RuntimeError : public std::runtime_error {
public:
    explicit RuntimeError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace ctxband
