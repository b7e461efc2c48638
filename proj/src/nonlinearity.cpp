#include "ggnet/nonlinearity.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <boost/math/tools/roots.hpp>

#include "ggnet/error.h"

namespace ggnet {
namespace {

double signed_power(double y, double a) {
  if (y == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(y), a), y);
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::optional<Envelope> power_envelope(double a) {
  // |y|^a <= |y|^a + 1 and, for a <= 1, also <= |y| + 1.
  if (a > 1.0) return std::nullopt;
  return Envelope{1.0, 1.0, a};
}

}  // namespace

Nonlinearity Nonlinearity::identity() {
  return {NonlinearityKind::identity, 0.0, 0.0, Envelope{1.0, 0.0, 1.0}};
}

Nonlinearity Nonlinearity::constant_one() {
  return {NonlinearityKind::constant_one, 0.0, 0.0, Envelope{0.0, 1.0, 0.0}};
}

Nonlinearity Nonlinearity::sign_power(double a) {
  if (!(a > 0.0) || !std::isfinite(a))
    throw std::invalid_argument("sign_power: exponent must be > 0");
  return {NonlinearityKind::sign_power, a, 0.0, power_envelope(a)};
}

Nonlinearity Nonlinearity::tanh() {
  return {NonlinearityKind::tanh, 0.0, 0.0, Envelope{0.0, 1.0, std::nullopt}};
}

Nonlinearity Nonlinearity::tanh_shifted(double c) {
  if (!std::isfinite(c)) throw std::invalid_argument("tanh_shifted: offset must be finite");
  return {NonlinearityKind::tanh_shifted, c, 0.0, Envelope{0.0, 1.0 + std::abs(c), std::nullopt}};
}

Nonlinearity Nonlinearity::limiter(double lo, double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw std::invalid_argument("limiter: requires finite lo < hi");
  return {NonlinearityKind::limiter, lo, hi,
          Envelope{0.0, std::max(std::abs(lo), std::abs(hi)), std::nullopt}};
}

Nonlinearity Nonlinearity::sin_plus_sign_power(double freq, double a) {
  if (!std::isfinite(freq)) throw std::invalid_argument("sin_plus_sign_power: freq must be finite");
  if (!(a > 0.0) || !std::isfinite(a))
    throw std::invalid_argument("sin_plus_sign_power: exponent must be > 0");
  return {NonlinearityKind::sin_plus_sign_power, freq, a, power_envelope(a)};
}

double Nonlinearity::operator()(double y) const {
  switch (kind_) {
    case NonlinearityKind::identity:
      return y;
    case NonlinearityKind::constant_one:
      return 1.0;
    case NonlinearityKind::sign_power:
      return signed_power(y, p0_);
    case NonlinearityKind::tanh:
      return std::tanh(y);
    case NonlinearityKind::tanh_shifted:
      return std::tanh(y) + p0_;
    case NonlinearityKind::limiter:
      return std::clamp(y, p0_, p1_);
    case NonlinearityKind::sin_plus_sign_power:
      return std::sin(p0_ * y) + signed_power(y, p1_);
  }
  return 0.0;
}

bool Nonlinearity::invertible() const {
  switch (kind_) {
    case NonlinearityKind::identity:
    case NonlinearityKind::sign_power:
    case NonlinearityKind::tanh:
    case NonlinearityKind::tanh_shifted:
      return true;
    default:
      return false;
  }
}

double Nonlinearity::inverse(double y, std::optional<std::size_t> node) const {
  switch (kind_) {
    case NonlinearityKind::identity:
      return y;
    case NonlinearityKind::sign_power:
      return signed_power(y, 1.0 / p0_);
    case NonlinearityKind::tanh:
      if (!(std::abs(y) < 1.0)) throw DomainError("tanh inverse needs |y| < 1", node, y);
      return std::atanh(y);
    case NonlinearityKind::tanh_shifted: {
      const double u = y - p0_;
      if (!(std::abs(u) < 1.0))
        throw DomainError("shifted tanh inverse needs |y - c| < 1 with c = " + format_number(p0_),
                          node, y);
      return std::atanh(u);
    }
    default:
      throw ConfigError(name() + " has no inverse");
  }
}

Nonlinearity Nonlinearity::with_envelope(Envelope env) const {
  if (!(env.alpha >= 0.0) || !(env.beta >= 0.0))
    throw ConfigError("envelope constants must be nonnegative");
  if (env.exponent && !(*env.exponent >= 0.0 && *env.exponent <= 1.0))
    throw ConfigError("envelope exponent must lie in [0, 1]");
  Nonlinearity copy = *this;
  copy.envelope_ = env;
  return copy;
}

std::vector<double> Nonlinearity::zeros() const {
  switch (kind_) {
    case NonlinearityKind::identity:
    case NonlinearityKind::sign_power:
    case NonlinearityKind::tanh:
      return {0.0};
    case NonlinearityKind::constant_one:
      return {};
    case NonlinearityKind::tanh_shifted:
      if (std::abs(p0_) < 1.0) return {std::atanh(-p0_)};
      return {};
    case NonlinearityKind::limiter:
      if (p0_ == 0.0 || p1_ == 0.0)
        throw ConfigError(name() + " vanishes on a half-line; its zero set cannot be regularized");
      if (p0_ < 0.0 && p1_ > 0.0) return {0.0};
      return {};
    case NonlinearityKind::sin_plus_sign_power: {
      // |sin| <= 1 < |y|^a outside [-1, 1], so every zero lies in there.
      std::vector<double> roots{0.0};
      const int steps = 20000;
      const double h = 2.0 / steps;
      auto f = [this](double y) { return (*this)(y); };
      boost::math::tools::eps_tolerance<double> tol(50);
      for (int k = 0; k < steps; ++k) {
        const double lo = -1.0 + k * h;
        const double hi = lo + h;
        const double flo = f(lo);
        const double fhi = f(hi);
        if (flo == 0.0 && lo != 0.0) roots.push_back(lo);
        if (flo * fhi >= 0.0) continue;
        if (lo < 0.0 && hi > 0.0) continue;  // the root at the origin
        std::uintmax_t iters = 200;
        auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
        roots.push_back(0.5 * (r.first + r.second));
      }
      std::sort(roots.begin(), roots.end());
      roots.erase(std::unique(roots.begin(), roots.end(),
                              [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                  roots.end());
      return roots;
    }
  }
  return {};
}

std::string Nonlinearity::name() const {
  switch (kind_) {
    case NonlinearityKind::sign_power:
      return "sign_power(" + format_number(p0_) + ")";
    case NonlinearityKind::tanh_shifted:
      return "tanh_shifted(" + format_number(p0_) + ")";
    case NonlinearityKind::limiter:
      return "limiter(" + format_number(p0_) + ", " + format_number(p1_) + ")";
    case NonlinearityKind::sin_plus_sign_power:
      return "sin_plus_sign_power(" + format_number(p0_) + ", " + format_number(p1_) + ")";
    default:
      return to_string(kind_);
  }
}

std::string to_string(NonlinearityKind kind) {
  switch (kind) {
    case NonlinearityKind::identity: return "identity";
    case NonlinearityKind::constant_one: return "constant_one";
    case NonlinearityKind::sign_power: return "sign_power";
    case NonlinearityKind::tanh: return "tanh";
    case NonlinearityKind::tanh_shifted: return "tanh_shifted";
    case NonlinearityKind::limiter: return "limiter";
    case NonlinearityKind::sin_plus_sign_power: return "sin_plus_sign_power";
  }
  return "unknown";
}

NonlinearityKind parse_nonlinearity_kind(const std::string& name) {
  for (auto k : {NonlinearityKind::identity, NonlinearityKind::constant_one,
                 NonlinearityKind::sign_power, NonlinearityKind::tanh,
                 NonlinearityKind::tanh_shifted, NonlinearityKind::limiter,
                 NonlinearityKind::sin_plus_sign_power})
    if (to_string(k) == name) return k;
  throw ConfigError("unknown nonlinearity kind '" + name + "'");
}

NonlinearityTriple::NonlinearityTriple(std::vector<Nonlinearity> sigma, std::vector<Nonlinearity> g,
                                       std::vector<Nonlinearity> h, std::string id)
    : sigma_(std::move(sigma)), g_(std::move(g)), h_(std::move(h)), id_(std::move(id)) {
  if (sigma_.empty()) throw ConfigError("triple needs at least one node");
  if (g_.size() != sigma_.size() || h_.size() != sigma_.size())
    throw ConfigError("sigma, g and h must list the same number of nodes");
  for (std::size_t i = 0; i < sigma_.size(); ++i) {
    if (!sigma_[i].invertible())
      throw ConfigError(sigma_[i].name() + " is not invertible", "sigma[" + std::to_string(i) + "]");
    const auto& eg = g_[i].envelope();
    const auto& eh = h_[i].envelope();
    if (eg && eh && eg->exponent && eh->exponent &&
        std::abs(*eg->exponent + *eh->exponent - 1.0) > 1e-12)
      throw ConfigError("declared exponents p = " + format_number(*eg->exponent) + " and q = " +
                            format_number(*eh->exponent) + " must satisfy p + q = 1",
                        "node[" + std::to_string(i) + "]");
  }
}

NonlinearityTriple NonlinearityTriple::uniform(std::size_t n_nodes, const Nonlinearity& sigma,
                                               const Nonlinearity& g, const Nonlinearity& h,
                                               std::string id) {
  return NonlinearityTriple(std::vector<Nonlinearity>(n_nodes, sigma),
                            std::vector<Nonlinearity>(n_nodes, g),
                            std::vector<Nonlinearity>(n_nodes, h), std::move(id));
}

NonlinearityTriple NonlinearityTriple::subset(const std::vector<std::size_t>& nodes) const {
  std::vector<Nonlinearity> s, g, h;
  for (auto i : nodes) {
    if (i >= n_nodes()) throw std::invalid_argument("NonlinearityTriple::subset: node out of range");
    s.push_back(sigma_[i]);
    g.push_back(g_[i]);
    h.push_back(h_[i]);
  }
  return NonlinearityTriple(std::move(s), std::move(g), std::move(h), id_);
}

bool NonlinearityTriple::is_linear() const {
  for (std::size_t i = 0; i < n_nodes(); ++i) {
    if (sigma_[i].kind() != NonlinearityKind::identity ||
        g_[i].kind() != NonlinearityKind::constant_one ||
        h_[i].kind() != NonlinearityKind::identity)
      return false;
  }
  return true;
}

}  // namespace ggnet
