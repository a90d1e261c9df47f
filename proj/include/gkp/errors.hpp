#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace gkp {

inline std::string format_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

// Operands built for different cutoffs, or a state/operator of the wrong size.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A state or operator populates the top Fock levels: the cutoff is too small.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative procedure (quadrature doubling, cutoff doubling, root bracketing)
// did not reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed sweep configuration. `line` is 0 when the error is not tied to a
// config file line (command-line overrides, cross-field validation).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, std::string field, int line = 0)
      : std::runtime_error(message), field_(std::move(field)), line_(line) {}

  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

}  // namespace gkp
