#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lrl {

/// Process exit codes used by the lrl command line tool.
enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,       // bad arguments or invalid configuration
    exit_check_failed = 2,
    exit_divergence = 3,
};

/// Configuration file problem. Carries the 1-based line number when known.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what, int line = -1)
        : std::runtime_error(line >= 0 ? "config line " + std::to_string(line) + ": " + what
                                       : "config: " + what),
          line_(line) {}

    int line() const noexcept { return line_; }

  private:
    int line_;
};

/// Numerical integration produced a non-finite state. Names the first bad step.
class DivergenceError : public std::runtime_error {
  public:
    DivergenceError(const std::string& what, std::int64_t step, double time)
        : std::runtime_error(what + " (first non-finite state at step " + std::to_string(step) +
                             ", t = " + std::to_string(time) + ")"),
          step_(step),
          time_(time) {}

    std::int64_t step() const noexcept { return step_; }
    double time() const noexcept { return time_; }

  private:
    std::int64_t step_;
    double time_;
};

/// A potential failed the certification of one of the interaction assumptions.
class AssumptionError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace lrl
