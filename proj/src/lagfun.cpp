#include "ggnet/lagfun.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ggnet/error.h"

namespace ggnet {

std::string to_string(WeightingMode mode) {
  return mode == WeightingMode::exact ? "exact" : "regularized";
}

WeightingMode parse_weighting_mode(const std::string& name) {
  if (name == "exact") return WeightingMode::exact;
  if (name == "regularized") return WeightingMode::regularized;
  throw ConfigError("unknown weighting mode '" + name + "'", "weighting.mode");
}

void WeightingConfig::validate() const {
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw ConfigError("must be >= 0", "weighting.delta");
  if (!(singular_tol >= 0.0) || !std::isfinite(singular_tol))
    throw ConfigError("must be >= 0", "weighting.singular_tol");
  if (mode == WeightingMode::exact && delta != 0.0)
    throw ConfigError("exact mode requires delta = 0", "weighting.delta");
  if (mode == WeightingMode::regularized && !(delta > 0.0))
    throw ConfigError("regularized mode requires delta > 0", "weighting.delta");
}

WeightingFunction::WeightingFunction(const NonlinearityTriple& triple, const WeightingConfig& cfg)
    : g_(triple.g()), cfg_(cfg) {
  cfg_.validate();
  if (cfg_.mode == WeightingMode::regularized) {
    zeros_.reserve(g_.size());
    for (const auto& g : g_) zeros_.push_back(g.zeros());
  }
}

double WeightingFunction::component(std::size_t i, double y, bool& singular) const {
  const Nonlinearity& g = g_[i];
  if (cfg_.mode == WeightingMode::exact) {
    const double gv = g(y);
    if (std::abs(gv) <= cfg_.singular_tol) singular = true;
    return 1.0 / gv;
  }
  for (double z : zeros_[i]) {
    if (std::abs(y - z) < cfg_.delta) {
      const double edge = y >= z ? z + cfg_.delta : z - cfg_.delta;
      return 1.0 / g(edge);
    }
  }
  const double gv = g(y);
  if (gv == 0.0) throw DomainError("g vanishes outside every regularization neighbourhood", i, y);
  return 1.0 / gv;
}

bool WeightingFunction::evaluate(const Eigen::Ref<const Eigen::VectorXd>& y,
                                 Eigen::Ref<Eigen::VectorXd> out) const {
  if (static_cast<std::size_t>(y.size()) != g_.size() || out.size() != y.size())
    throw std::invalid_argument("omega: dimension mismatch");
  bool singular = false;
  for (std::size_t i = 0; i < g_.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = component(i, y(static_cast<Eigen::Index>(i)), singular);
  return singular;
}

OmegaValue WeightingFunction::operator()(const Eigen::Ref<const Eigen::VectorXd>& y) const {
  OmegaValue v;
  v.weights.resize(y.size());
  v.in_z = evaluate(y, v.weights);
  return v;
}

OmegaValue omega_eval(const NonlinearityTriple& triple, const WeightingConfig& cfg,
                      const Eigen::VectorXd& y) {
  return WeightingFunction(triple, cfg)(y);
}

namespace {

// Neumaier compensated update of sum/comp with `add`, entry by entry.
inline void compensated_add(double& sum, double& comp, double add) {
  const double t = sum + add;
  if (std::abs(sum) >= std::abs(add))
    comp += (sum - t) + add;
  else
    comp += (add - t) + sum;
  sum = t;
}

}  // namespace

LagMatrices::LagMatrices(std::size_t n_nodes) : n_(n_nodes) {
  if (n_nodes == 0) throw std::invalid_argument("LagMatrices: n_nodes must be >= 1");
  const auto n = static_cast<Eigen::Index>(n_nodes);
  f0_sum_ = Eigen::MatrixXd::Zero(n, n);
  f0_comp_ = Eigen::MatrixXd::Zero(n, n);
  f1_sum_ = Eigen::MatrixXd::Zero(n, n);
  f1_comp_ = Eigen::MatrixXd::Zero(n, n);
  hv_.resize(n);
  lhs_.resize(n);
}

void LagMatrices::add_outer(const Eigen::Ref<const Eigen::VectorXd>& hv,
                            const Eigen::Ref<const Eigen::VectorXd>& lhs) {
  const auto n = static_cast<Eigen::Index>(n_);
  if (hv.size() != n || lhs.size() != n) throw std::invalid_argument("LagMatrices: dimension mismatch");
  double* s0 = f0_sum_.data();
  double* c0 = f0_comp_.data();
  double* s1 = f1_sum_.data();
  double* c1 = f1_comp_.data();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double hj = hv(j);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index at = j * n + i;
      compensated_add(s0[at], c0[at], hv(i) * hj);
      compensated_add(s1[at], c1[at], lhs(i) * hj);
    }
  }
  ++count_;
}

void LagMatrices::accumulate(const NonlinearityTriple& triple, const WeightingFunction& omega,
                             const Eigen::Ref<const Eigen::VectorXd>& y_k,
                             const Eigen::Ref<const Eigen::VectorXd>& y_k1) {
  if (triple.n_nodes() != n_ || static_cast<std::size_t>(y_k.size()) != n_ ||
      static_cast<std::size_t>(y_k1.size()) != n_)
    throw std::invalid_argument("LagMatrices::accumulate: dimension mismatch");
  const auto& sigma = triple.sigma();
  const auto& h = triple.h();
  for (std::size_t i = 0; i < n_; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    hv_(ii) = h[i](y_k(ii));
  }
  const bool in_z = omega.evaluate(y_k, lhs_);
  if (in_z) {
    lhs_.setZero();
  } else {
    for (std::size_t i = 0; i < n_; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      lhs_(ii) *= sigma[i].inverse(y_k1(ii), i);
    }
  }
  add_outer(hv_, lhs_);
}

void LagMatrices::accumulate(const NonlinearityTriple& triple, const WeightingConfig& cfg,
                             const Eigen::VectorXd& y_k, const Eigen::VectorXd& y_k1) {
  accumulate(triple, WeightingFunction(triple, cfg), y_k, y_k1);
}

void LagMatrices::merge(const LagMatrices& other) {
  if (other.n_ != n_) throw std::invalid_argument("LagMatrices::merge: dimension mismatch");
  const Eigen::Index total = f0_sum_.size();
  for (Eigen::Index at = 0; at < total; ++at) {
    compensated_add(f0_sum_.data()[at], f0_comp_.data()[at], other.f0_sum_.data()[at]);
    compensated_add(f1_sum_.data()[at], f1_comp_.data()[at], other.f1_sum_.data()[at]);
  }
  f0_comp_ += other.f0_comp_;
  f1_comp_ += other.f1_comp_;
  count_ += other.count_;
}

LagMatrices LagMatrices::from_sums(Eigen::MatrixXd f0_sum, Eigen::MatrixXd f1_sum, std::size_t count) {
  if (f0_sum.rows() != f0_sum.cols() || f1_sum.rows() != f0_sum.rows() ||
      f1_sum.cols() != f0_sum.cols())
    throw std::invalid_argument("LagMatrices::from_sums: shape mismatch");
  LagMatrices lag(static_cast<std::size_t>(f0_sum.rows()));
  lag.f0_sum_ = std::move(f0_sum);
  lag.f1_sum_ = std::move(f1_sum);
  lag.count_ = count;
  return lag;
}

LagEstimates finalize(const LagMatrices& lag) {
  if (lag.count() == 0) throw InvalidStateError("finalize: no samples accumulated");
  const double inv = 1.0 / static_cast<double>(lag.count());
  return {lag.f0_sum() * inv, lag.f1_sum() * inv};
}

LagMatrices accumulate_trajectory(const Trajectory& traj, const NonlinearityTriple& triple,
                                  const WeightingConfig& cfg) {
  if (traj.n_steps() < 1) throw std::invalid_argument("accumulate_trajectory: need at least one transition");
  LagMatrices lag(traj.n_nodes());
  const WeightingFunction omega(triple, cfg);
  for (std::size_t k = 0; k < traj.n_steps(); ++k) {
    try {
      lag.accumulate(triple, omega, traj.state(k), traj.state(k + 1));
    } catch (const DomainError& e) {
      throw e.at_epoch(k + 1);
    }
  }
  return lag;
}

std::vector<double> running_f1_max(const Trajectory& traj, const NonlinearityTriple& triple,
                                   const WeightingConfig& cfg) {
  LagMatrices lag(traj.n_nodes());
  const WeightingFunction omega(triple, cfg);
  std::vector<double> out;
  out.reserve(traj.n_steps());
  for (std::size_t k = 0; k < traj.n_steps(); ++k) {
    try {
      lag.accumulate(triple, omega, traj.state(k), traj.state(k + 1));
    } catch (const DomainError& e) {
      throw e.at_epoch(k + 1);
    }
    out.push_back(lag.f1_sum().cwiseAbs().maxCoeff() / static_cast<double>(lag.count()));
  }
  return out;
}

BlowupVerdict detect_blowup(const std::vector<double>& profile, double factor, std::size_t burn_in) {
  if (profile.size() <= burn_in)
    throw std::invalid_argument("detect_blowup: profile shorter than the burn-in window");
  std::vector<double> window(profile.begin() + static_cast<std::ptrdiff_t>(burn_in), profile.end());
  BlowupVerdict v;
  v.peak = *std::max_element(window.begin(), window.end());
  auto mid = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2);
  std::nth_element(window.begin(), mid, window.end());
  v.median = *mid;
  v.fired = v.peak > factor * v.median;
  return v;
}

}  // namespace ggnet
