#pragma once

#include <stdexcept>
#include <string>

namespace hfh {

/// Failure classes. The CLI maps each to its own exit code.
enum class ErrorKind {
    Numerical,         ///< convergence failure, escaped orbit, budget exhausted
    Config,            ///< bad configuration or a model that violates the hypotheses
    Window,            ///< traced portion of the manifolds too short for the query
    TheoremViolation,  ///< computed data contradict a proven property
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct NumericalError : Error {
    explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

struct WindowError : Error {
    explicit WindowError(const std::string& what) : Error(ErrorKind::Window, what) {}
};

struct TheoremViolation : Error {
    explicit TheoremViolation(const std::string& what) : Error(ErrorKind::TheoremViolation, what) {}
};

}  // namespace hfh
