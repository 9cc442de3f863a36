#pragma once

#include <stdexcept>
#include <string>

namespace parex {

/// Bad arguments: dimension mismatches, invalid configuration values.
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// An operation was called before its prerequisites were computed.
class StateError : public std::logic_error {
public:
    explicit StateError(const std::string& what) : std::logic_error(what) {}
};

/// Evaluation time exceeds the certified validity horizon of an expansion.
/// Callers must compose shorter steps via the semigroup property instead.
class HorizonError : public std::runtime_error {
public:
    HorizonError(const std::string& what, double horizon)
        : std::runtime_error(what), horizon_(horizon) {}
    double horizon() const noexcept { return horizon_; }

private:
    double horizon_;
};

/// The correction iteration of the splitting scheme failed to contract.
class DivergenceError : public std::runtime_error {
public:
    explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace parex
