#pragma once

#include <stdexcept>
#include <string>

namespace herman {

/// Input violates a documented precondition (bad config, out-of-domain point, ...).
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// Request is well-formed but exceeds what this build is sized for
/// (state space too large, mask space too large, word width exceeded).
class CapacityError : public std::runtime_error {
public:
    explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

/// A linear-system solve produced values incompatible with the functional
/// (negative or non-finite E(a^T)): the requested base lies outside the
/// convergence region.
class DivergenceError : public std::runtime_error {
public:
    explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// A stochastic estimate could not be formed (every run censored).
class EstimationError : public std::runtime_error {
public:
    explicit EstimationError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace herman
