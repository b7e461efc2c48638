#ifndef GGNET_LAGFUN_H
#define GGNET_LAGFUN_H

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ggnet/dynamics.h"
#include "ggnet/nonlinearity.h"

namespace ggnet {

enum class WeightingMode { exact, regularized };

std::string to_string(WeightingMode mode);
WeightingMode parse_weighting_mode(const std::string& name);

// omega(y) = 1 / g(y) componentwise. In regularized mode every zero z of
// g_i gets an open neighbourhood (z - delta, z + delta) inside which omega_i
// is frozen at its value on the nearest neighbourhood edge.
struct WeightingConfig {
  WeightingMode mode = WeightingMode::exact;
  double delta = 0.0;
  double singular_tol = 0.0;

  // Throws ConfigError when the fields are inconsistent.
  void validate() const;
};

struct OmegaValue {
  Eigen::VectorXd weights;
  bool in_z = false;  // some |g_i(y_i)| <= singular_tol (exact mode only)
};

// Precomputed evaluator for omega. Zero locations of each g_i are looked up
// once so that repeated evaluation stays cheap.
class WeightingFunction {
 public:
  WeightingFunction(const NonlinearityTriple& triple, const WeightingConfig& cfg);

  OmegaValue operator()(const Eigen::Ref<const Eigen::VectorXd>& y) const;
  // Writes weights into `out`; returns the in_z flag.
  bool evaluate(const Eigen::Ref<const Eigen::VectorXd>& y, Eigen::Ref<Eigen::VectorXd> out) const;

  const WeightingConfig& config() const { return cfg_; }

 private:
  double component(std::size_t i, double y, bool& singular) const;

  std::vector<Nonlinearity> g_;
  std::vector<std::vector<double>> zeros_;
  WeightingConfig cfg_;
};

OmegaValue omega_eval(const NonlinearityTriple& triple, const WeightingConfig& cfg,
                      const Eigen::VectorXd& y);

// Running sums of F0(y_k) = h(y_k) h(y_k)^T and
// F1(y_k, y_{k+1}) = [omega(y_k) .* sigma^{-1}(y_{k+1})] h(y_k)^T 1{y_k not in Z}.
// Sums are compensated (Neumaier) entry by entry.
class LagMatrices {
 public:
  explicit LagMatrices(std::size_t n_nodes);

  std::size_t n_nodes() const { return n_; }
  std::size_t count() const { return count_; }

  // Adds one pair. Throws DomainError if sigma^{-1}(y_k1) is undefined.
  void accumulate(const NonlinearityTriple& triple, const WeightingFunction& omega,
                  const Eigen::Ref<const Eigen::VectorXd>& y_k,
                  const Eigen::Ref<const Eigen::VectorXd>& y_k1);
  void accumulate(const NonlinearityTriple& triple, const WeightingConfig& cfg,
                  const Eigen::VectorXd& y_k, const Eigen::VectorXd& y_k1);

  // Adds precomputed outer-product factors: F0 += hv hv^T, F1 += lhs hv^T.
  void add_outer(const Eigen::Ref<const Eigen::VectorXd>& hv,
                 const Eigen::Ref<const Eigen::VectorXd>& lhs);

  // Sums of the other accumulator (associative, commutative).
  void merge(const LagMatrices& other);

  Eigen::MatrixXd f0_sum() const { return f0_sum_ + f0_comp_; }
  Eigen::MatrixXd f1_sum() const { return f1_sum_ + f1_comp_; }

  // Rebuilds an accumulator from stored sums (compensation is lost).
  static LagMatrices from_sums(Eigen::MatrixXd f0_sum, Eigen::MatrixXd f1_sum, std::size_t count);

 private:
  std::size_t n_;
  std::size_t count_ = 0;
  Eigen::MatrixXd f0_sum_, f0_comp_, f1_sum_, f1_comp_;
  Eigen::VectorXd hv_, lhs_;
};

struct LagEstimates {
  Eigen::MatrixXd f0_hat;
  Eigen::MatrixXd f1_hat;
};

// Averages; throws InvalidStateError when nothing was accumulated.
LagEstimates finalize(const LagMatrices& lag);

// Accumulates all n pairs (y_k, y_{k+1}), k = 0..n-1, of a trajectory.
// Domain errors carry the offending epoch.
LagMatrices accumulate_trajectory(const Trajectory& traj, const NonlinearityTriple& triple,
                                  const WeightingConfig& cfg);

// max_ij |F1hat(k)_ij| of the running average after every pair k >= 1.
std::vector<double> running_f1_max(const Trajectory& traj, const NonlinearityTriple& triple,
                                   const WeightingConfig& cfg);

struct BlowupVerdict {
  double peak = 0.0;    // max over the evaluation window
  double median = 0.0;  // median over the evaluation window
  bool fired = false;   // peak > factor * median
};

// Blow-up detector over a running-statistic profile. The first `burn_in`
// entries are ignored so that start-up transients of short averages do not
// count.
BlowupVerdict detect_blowup(const std::vector<double>& profile, double factor = 10.0,
                            std::size_t burn_in = 1000);

}  // namespace ggnet

#endif  // GGNET_LAGFUN_H
