#ifndef GGNET_RECOVERY_H
#define GGNET_RECOVERY_H

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ggnet/dynamics.h"
#include "ggnet/lagfun.h"
#include "ggnet/netgen.h"
#include "ggnet/nonlinearity.h"

namespace ggnet {

// Optimal two-cluster split of scalars.
struct ClusterSplit {
  double threshold = 0.0;  // values > threshold belong to the high cluster
  double low_centroid = 0.0;
  double high_centroid = 0.0;
  double within_sse = 0.0;
  std::size_t low_count = 0;
  std::size_t high_count = 0;
  // Between-cluster share of the total sum of squares, in [0, 1].
  double explained = 0.0;

  // Typical of unstructured data: 2-means on a Gaussian explains ~2/pi.
  bool near_degenerate() const { return explained < 0.8; }
};

// Exact 1-D 2-means: sorts, scores every split between distinct
// consecutive values and keeps the first minimizer of the within-cluster
// sum of squares. Throws DegenerateClusterError with fewer than two
// distinct values.
ClusterSplit kmeans2_1d(std::span<const double> values);

// Maps local estimate indices to global node ids.
struct NodeIndexMap {
  std::vector<std::size_t> nodes;
  std::size_t n_total = 0;
};

// Clusters the off-diagonal entries of A_hat; slots in the high cluster are
// edges. With a map, the graph is over n_total nodes with global indices.
DirectedGraph classify_edges(const Eigen::MatrixXd& a_hat,
                             const std::optional<NodeIndexMap>& map = std::nullopt);
// Split used by classify_edges (exposed for reporting).
ClusterSplit offdiagonal_split(const Eigen::MatrixXd& a_hat);

struct RecoveryMetrics {
  std::size_t false_edges = 0;
  std::size_t missed_edges = 0;
  std::size_t total_offdiag = 0;
  double edge_error_rate = 0.0;
  double matrix_rel_error = 0.0;     // off-diagonal Frobenius, relative
  double identifiability_gap = 0.0;  // NaN without both edges and non-edges
};

RecoveryMetrics score(const DirectedGraph& recovered, const DirectedGraph& truth,
                      const Eigen::MatrixXd& a_hat, const Eigen::MatrixXd& a);

struct ProfileEntry {
  std::size_t slot = 0;  // row-major linear index i * N + j
  std::size_t row = 0;
  std::size_t col = 0;
  double true_value = 0.0;
  double est_value = 0.0;
};

// Off-diagonal entries ordered by ascending true value (ties keep row-major
// order), each paired with its estimate.
std::vector<ProfileEntry> sorted_entry_profile(const Eigen::MatrixXd& a, const Eigen::MatrixXd& a_hat);

// Bias/variance summary of a profile: entries are grouped by identical true
// value; `mean_offset` is the slot-average |group mean - true value| and
// `oscillation` the sup-norm of estimates around their group mean.
struct ProfileStats {
  double mean_offset = 0.0;
  double oscillation = 0.0;
};
ProfileStats profile_stats(const std::vector<ProfileEntry>& profile);

enum class MatrixNorm { infinity, two };
std::string to_string(MatrixNorm norm);

struct AssumptionReport {
  std::optional<double> kappa_s;
  std::optional<int> kappa_branch;  // 1: p,q > 0; 2: p = 1, q = 0; 3: p = 0, q = 1
  std::optional<bool> stability_sufficient;
  bool sigma_invertible = false;
  bool pq_sum_ok = false;
  std::optional<double> p;
  std::optional<double> q;
  std::optional<double> f0_condition;
  std::optional<bool> omega_moment_flag;  // false: the omega moment keeps growing
  std::optional<double> omega_moment_ratio;
  std::vector<std::string> notes;
};

// Stability constant from the declared envelopes and ||A||. Throws
// ConfigError on missing envelopes or exponents matching no branch.
AssumptionReport stability_constant(const NonlinearityTriple& triple, const CombinationMatrix& a,
                                    MatrixNorm norm = MatrixNorm::infinity);

// Running average of ||omega(y_k)||^2 after each epoch k = 1..n.
std::vector<double> omega_moment_profile(const Trajectory& traj, const NonlinearityTriple& triple,
                                         const WeightingConfig& cfg);

struct OmegaMomentCheck {
  double early_peak = 0.0;
  double late_peak = 0.0;
  bool bounded = true;
};

// Integrability heuristic. The running-average profile is split at
// sqrt(n) (halves in log-time); the check fails when the peak over the late
// part exceeds `factor` times the peak over the early part.
OmegaMomentCheck check_omega_moment(const std::vector<double>& profile, double factor = 10.0);

// Data-side checks: omega moment, sigma invertibility, p + q = 1 and the
// condition number of F0hat.
AssumptionReport assumption_report(const Trajectory& traj, const NonlinearityTriple& triple,
                                   const WeightingConfig& cfg, const Eigen::MatrixXd& f0_hat);

}  // namespace ggnet

#endif  // GGNET_RECOVERY_H
