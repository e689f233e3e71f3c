#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bifirom {

// Base for all toolkit errors so the CLI can catch one type at the boundary.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// mu outside the problem's parameter box, invalid grid, etc.
struct DomainError : Error {
    using Error::Error;
};

// Broken precondition between modules (missing state, pattern mismatch, ...).
struct ContractError : Error {
    using Error::Error;
};

struct SolverError : Error {
    using Error::Error;
};

struct NonConvergenceError : SolverError {
    NonConvergenceError(const std::string& msg, std::vector<double> history)
        : SolverError(msg), step_history(std::move(history)) {}
    std::vector<double> step_history;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace bifirom
