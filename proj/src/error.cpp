#include "ggnet/error.h"

#include <sstream>

namespace ggnet {

std::string SingularMatrixError::build_message(double condition, bool exact,
                                               const std::string& what_matrix) {
  std::ostringstream os;
  os.precision(6);
  if (exact)
    os << what_matrix << " is singular";
  else
    os << what_matrix << " is near-singular (condition number " << condition << ")";
  return os.str();
}

namespace {
std::string divergence_message(std::size_t epoch, std::size_t node, double value) {
  std::ostringstream os;
  os << "trajectory diverged at epoch " << epoch << ", node " << node << " (value " << value << ")";
  return os.str();
}

std::string domain_message(const std::string& base, std::optional<std::size_t> node, double value,
                           std::optional<std::size_t> epoch) {
  std::ostringstream os;
  os.precision(17);
  os << base << ": value " << value;
  if (node) os << " at node " << *node;
  if (epoch) os << " at epoch " << *epoch;
  return os.str();
}
}  // namespace

DivergenceError::DivergenceError(std::size_t epoch, std::size_t node, double value)
    : NumericalError(divergence_message(epoch, node, value)), epoch_(epoch), node_(node), value_(value) {}

DomainError::DomainError(const std::string& message, std::optional<std::size_t> node, double value,
                         std::optional<std::size_t> epoch)
    : NumericalError(domain_message(message, node, value, epoch)),
      base_(message),
      node_(node),
      value_(value),
      epoch_(epoch) {}

DomainError DomainError::at_epoch(std::size_t epoch) const {
  return DomainError(base_, node_, value_, epoch);
}

}  // namespace ggnet
