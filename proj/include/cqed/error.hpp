#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cqed {

/// Input rejected before any computation. `field()` names the offending
/// parameter or config key.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Integration or extraction failed a numerical guarantee (probability
/// ledger, horizon, degenerate pulse).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

class LedgerViolation : public NumericError {
 public:
  LedgerViolation(std::size_t node, double time, double residual)
      : NumericError("probability ledger violated at node " +
                     std::to_string(node) + " (t=" + std::to_string(time) +
                     " ns, residual=" + std::to_string(residual) + ")"),
        node_(node),
        time_(time),
        residual_(residual) {}

  std::size_t node() const noexcept { return node_; }
  double time() const noexcept { return time_; }
  double residual() const noexcept { return residual_; }

 private:
  std::size_t node_;
  double time_;
  double residual_;
};

class HorizonError : public NumericError {
 public:
  using NumericError::NumericError;
};

class IoError : public std::runtime_error {
 public:
  IoError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace cqed
