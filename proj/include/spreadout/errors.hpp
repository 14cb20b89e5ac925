// errors.hpp -- exception hierarchy shared by all modules.
//
// The CLI maps these onto process exit codes:
//   ValidationError -> 1, InvariantError -> 2, CapError -> 3.

#pragma once

#include <stdexcept>
#include <string>

namespace spreadout {

// Bad user input: malformed config, parameter out of range, wrong header.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A mathematical invariant the code relies on failed at runtime
// (window overflow, vanishing denominator, divergent sum, ...).
class InvariantError : public std::runtime_error {
public:
    explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

// An exact backend was asked for more state than its configured cap allows.
class CapError : public std::runtime_error {
public:
    explicit CapError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace spreadout
