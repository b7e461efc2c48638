#ifndef GGNET_ERROR_H
#define GGNET_ERROR_H

#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace ggnet {

// Root of the library's error hierarchy. Precondition violations on plain
// arguments are reported with std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent configuration. `field` is a dotted path such as
// "sim.n_steps" when the offending entry is known.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message, std::string field = {})
      : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class InvalidStateError : public Error {
 public:
  using Error::Error;
};

// Everything that maps to the "numerical failure" exit code.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public NumericalError {
 public:
  SingularMatrixError(double condition, bool exact, const std::string& what_matrix)
      : NumericalError(build_message(condition, exact, what_matrix)),
        condition_(condition),
        exact_(exact) {}

  double condition() const { return condition_; }
  // True when the smallest singular value is exactly zero.
  bool exact() const { return exact_; }

 private:
  static std::string build_message(double condition, bool exact, const std::string& what_matrix);
  double condition_;
  bool exact_;
};

class DivergenceError : public NumericalError {
 public:
  DivergenceError(std::size_t epoch, std::size_t node, double value);
  std::size_t epoch() const { return epoch_; }
  std::size_t node() const { return node_; }
  double value() const { return value_; }

 private:
  std::size_t epoch_;
  std::size_t node_;
  double value_;
};

// Argument outside the range of an inverse nonlinearity.
class DomainError : public NumericalError {
 public:
  DomainError(const std::string& message, std::optional<std::size_t> node, double value,
              std::optional<std::size_t> epoch = std::nullopt);
  std::optional<std::size_t> node() const { return node_; }
  std::optional<std::size_t> epoch() const { return epoch_; }
  double value() const { return value_; }

  // Same error with the epoch attached.
  DomainError at_epoch(std::size_t epoch) const;

 private:
  std::string base_;
  std::optional<std::size_t> node_;
  double value_;
  std::optional<std::size_t> epoch_;
};

class DegenerateClusterError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace ggnet

#endif  // GGNET_ERROR_H
