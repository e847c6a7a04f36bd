#ifndef MTLAB_ERRORS_HPP
#define MTLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mtlab {

// Base for every numerical failure; the CLI maps these to exit code 2.
class NumericsError : public std::runtime_error {
public:
    explicit NumericsError(const std::string& what) : std::runtime_error(what) {}
};

// Quadrature did not reach the requested tolerance within its subdivision budget.
class QuadratureError : public NumericsError {
public:
    explicit QuadratureError(const std::string& what) : NumericsError(what) {}
};

// A macroscopic state whose Gram determinant is negative beyond tolerance,
// i.e. no joint Gaussian with those direction cosines exists.
class InfeasibleStateError : public NumericsError {
public:
    explicit InfeasibleStateError(const std::string& what) : NumericsError(what) {}
};

// Covariance is feasible but singular where a strictly positive-definite one
// is required; callers may fall back to the Monte Carlo oracle.
class DegenerateCovarianceError : public NumericsError {
public:
    explicit DegenerateCovarianceError(const std::string& what) : NumericsError(what) {}
};

// Config-file parse or validation failure; the CLI maps this to exit code 1.
class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& what)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    int line() const { return line_; }

private:
    int line_;
};

} // namespace mtlab

#endif // MTLAB_ERRORS_HPP
