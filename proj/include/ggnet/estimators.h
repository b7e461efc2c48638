#ifndef GGNET_ESTIMATORS_H
#define GGNET_ESTIMATORS_H

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ggnet/dynamics.h"
#include "ggnet/lagfun.h"
#include "ggnet/nonlinearity.h"

namespace ggnet {

enum class EstimatorKind { egg, granger, correlation, precision, egg_partial, granger_partial, least_squares };

std::string to_string(EstimatorKind kind);
EstimatorKind parse_estimator_kind(const std::string& name);

inline constexpr double kDefaultCondLimit = 1e12;

struct EstimateReport {
  Eigen::MatrixXd a_hat;
  EstimatorKind kind = EstimatorKind::egg;
  std::size_t n_samples = 0;
  // 2-norm condition number of the inverted matrix; empty when the
  // estimator inverts nothing.
  std::optional<double> cond_f0;
  std::optional<std::vector<std::size_t>> observed_set;
};

// 2-norm condition number sigma_max / sigma_min (infinity when sigma_min == 0).
double condition_number(const Eigen::MatrixXd& m);

// A_hat = F1hat F0hat^{-1} through a factorization of F0hat.
// Throws SingularMatrixError when F0hat is singular or its condition
// number exceeds cond_limit.
EstimateReport egg_estimate(const Eigen::MatrixXd& f0_hat, const Eigen::MatrixXd& f1_hat,
                            double cond_limit = kDefaultCondLimit);

// Convenience: accumulate the trajectory and run egg_estimate.
EstimateReport egg_estimate(const Trajectory& traj, const NonlinearityTriple& triple,
                            const WeightingConfig& cfg, double cond_limit = kDefaultCondLimit);

// Raw lag-zero and lag-one moments R0 = (1/n) sum y_k y_k^T,
// R1 = (1/n) sum y_{k+1} y_k^T over k = 0..n-1.
struct Correlations {
  Eigen::MatrixXd r0;
  Eigen::MatrixXd r1;
};
Correlations sample_correlations(const Trajectory& traj);

// Classic linear Granger estimate R1 R0^{-1}.
EstimateReport granger_estimate(const Trajectory& traj, double cond_limit = kDefaultCondLimit);
EstimateReport correlation_estimate(const Trajectory& traj);
EstimateReport precision_estimate(const Trajectory& traj, double cond_limit = kDefaultCondLimit);

// Least-squares fit
//   min_B sum_k || 1{y_k not in Z} omega(y_k) .* sigma^{-1}(y_{k+1}) - B h(y_k) ||^2
// solved by column-pivoted QR on the stacked design, without forming the
// lag matrices. Throws SingularMatrixError on a rank-deficient design or
// when cond(H^T H) exceeds cond_limit.
EstimateReport least_squares_estimate(const Trajectory& traj, const NonlinearityTriple& triple,
                                      const WeightingConfig& cfg,
                                      double cond_limit = kDefaultCondLimit);

// A trajectory restricted to observed nodes. Only `observe` builds it, so a
// partial estimator never sees latent coordinates.
class PartialObservation {
 public:
  const Trajectory& trajectory() const { return traj_; }
  const std::vector<std::size_t>& nodes() const { return nodes_; }

 private:
  friend PartialObservation observe(const Trajectory& traj, std::vector<std::size_t> nodes);
  Trajectory traj_;
  std::vector<std::size_t> nodes_;
};

// Sorted, duplicate-free subset S of {0..N-1}.
PartialObservation observe(const Trajectory& traj, std::vector<std::size_t> nodes);

// [F1]_S ([F0]_S)^{-1} (kind = egg) or the Granger analogue (kind = granger)
// from observed coordinates only. `triple` is the full-network triple; its
// restriction to S is taken internally.
EstimateReport partial_estimate(const PartialObservation& obs, EstimatorKind kind,
                                const NonlinearityTriple& triple, const WeightingConfig& cfg,
                                double cond_limit = kDefaultCondLimit);

}  // namespace ggnet

#endif  // GGNET_ESTIMATORS_H
