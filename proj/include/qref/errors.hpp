#pragma once

#include <stdexcept>
#include <string>

namespace qref {

// Base for everything the algebra layer can throw; the CLI maps these to exit code 3.
struct AlgebraError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownGenerator : AlgebraError {
    using AlgebraError::AlgebraError;
};

// A reordering needs a commutator with no declared expansion, or the rewrite
// provably fails to terminate (mixed inverses over a noncommuting pair).
struct NonClosedCommutator : AlgebraError {
    using AlgebraError::AlgebraError;
};

struct NotLinearInMomentum : AlgebraError {
    using AlgebraError::AlgebraError;
};

struct LapseNotInvertible : AlgebraError {
    using AlgebraError::AlgebraError;
};

struct FrozenClock : AlgebraError {
    using AlgebraError::AlgebraError;
};

struct HamiltonianNotInCommutant : AlgebraError {
    using AlgebraError::AlgebraError;
};

struct DegreeOverflow : AlgebraError {
    using AlgebraError::AlgebraError;
};

struct UnknownModel : AlgebraError {
    using AlgebraError::AlgebraError;
};

struct BadParameter : AlgebraError {
    using AlgebraError::AlgebraError;
};

// DSL front end; the CLI maps these to exit code 2.
struct ParseError : std::runtime_error {
    ParseError(std::string msg, int line, int column)
        : std::runtime_error(std::move(msg)), line(line), column(column) {}
    int line;
    int column;
};

} // namespace qref
