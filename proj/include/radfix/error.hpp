#pragma once

#include <stdexcept>
#include <string>

namespace radfix {

/// Precondition violated by an argument (d <= 2, N too small, r outside [0,1], ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computed quantity became non-finite.
class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Picard iterate left the guard ball.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, int iteration, double norm)
        : std::runtime_error(what), iteration_(iteration), norm_(norm) {}

    int iteration() const noexcept { return iteration_; }
    double norm() const noexcept { return norm_; }

private:
    int iteration_;
    double norm_;
};

/// Shooting could not bracket the central density.
class BracketError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace radfix
