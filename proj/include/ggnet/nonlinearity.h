#ifndef GGNET_NONLINEARITY_H
#define GGNET_NONLINEARITY_H

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace ggnet {

enum class NonlinearityKind {
  identity,
  constant_one,
  sign_power,           // sign(y)|y|^a
  tanh,
  tanh_shifted,         // tanh(y) + c
  limiter,              // clamp(y, lo, hi)
  sin_plus_sign_power,  // sin(f y) + sign(y)|y|^a
};

// Growth envelope |f(y)| <= alpha |y|^exponent + beta. A missing exponent is
// only meaningful for bounded functions (alpha == 0).
struct Envelope {
  double alpha = 0.0;
  double beta = 0.0;
  std::optional<double> exponent;

  bool operator==(const Envelope&) const = default;
};

// Scalar nonlinearity from a closed builtin family.
class Nonlinearity {
 public:
  static Nonlinearity identity();
  static Nonlinearity constant_one();
  static Nonlinearity sign_power(double a);
  static Nonlinearity tanh();
  static Nonlinearity tanh_shifted(double c);
  static Nonlinearity limiter(double lo, double hi);
  static Nonlinearity sin_plus_sign_power(double freq, double a);

  NonlinearityKind kind() const { return kind_; }
  // Family parameters: a / c / (lo, hi) / (freq, a); unused slots are 0.
  double param0() const { return p0_; }
  double param1() const { return p1_; }

  double operator()(double y) const;

  bool invertible() const;
  // Exact inverse. Throws DomainError outside the range; `node` is only
  // used for the message.
  double inverse(double y, std::optional<std::size_t> node = std::nullopt) const;

  // Conservative default envelope for builtins, or the user override.
  // Empty when no envelope is valid on all of R (e.g. sign_power, a > 1).
  const std::optional<Envelope>& envelope() const { return envelope_; }
  Nonlinearity with_envelope(Envelope env) const;

  // Real zeros of the function, used to place regularization
  // neighbourhoods. Throws ConfigError when the zero set is not a finite
  // set of points.
  std::vector<double> zeros() const;

  std::string name() const;
  bool operator==(const Nonlinearity&) const = default;

 private:
  Nonlinearity(NonlinearityKind kind, double p0, double p1, std::optional<Envelope> env)
      : kind_(kind), p0_(p0), p1_(p1), envelope_(env) {}

  NonlinearityKind kind_;
  double p0_;
  double p1_;
  std::optional<Envelope> envelope_;
};

std::string to_string(NonlinearityKind kind);
NonlinearityKind parse_nonlinearity_kind(const std::string& name);

// Per-node (sigma, g, h) for the update
//   y_{n+1} = sigma( g(y_n) .* (A h(y_n)) + x_{n+1} ).
// Construction validates that every sigma is invertible and that per-node
// exponent declarations of g and h sum to one.
class NonlinearityTriple {
 public:
  NonlinearityTriple(std::vector<Nonlinearity> sigma, std::vector<Nonlinearity> g,
                     std::vector<Nonlinearity> h, std::string id = "custom");

  // Same (sigma, g, h) on every node.
  static NonlinearityTriple uniform(std::size_t n_nodes, const Nonlinearity& sigma,
                                    const Nonlinearity& g, const Nonlinearity& h,
                                    std::string id = "custom");

  std::size_t n_nodes() const { return sigma_.size(); }
  const std::vector<Nonlinearity>& sigma() const { return sigma_; }
  const std::vector<Nonlinearity>& g() const { return g_; }
  const std::vector<Nonlinearity>& h() const { return h_; }
  const std::string& id() const { return id_; }

  // Restriction to the listed nodes, in the listed order.
  NonlinearityTriple subset(const std::vector<std::size_t>& nodes) const;

  // sigma = identity, g = 1, h = identity on every node.
  bool is_linear() const;

 private:
  std::vector<Nonlinearity> sigma_;
  std::vector<Nonlinearity> g_;
  std::vector<Nonlinearity> h_;
  std::string id_;
};

}  // namespace ggnet

#endif  // GGNET_NONLINEARITY_H
