#ifndef GGNET_DYNAMICS_H
#define GGNET_DYNAMICS_H

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ggnet/netgen.h"
#include "ggnet/nonlinearity.h"

namespace ggnet {

// Zero-mean Gaussian innovations, independent across nodes.
struct NoiseModel {
  std::vector<double> std_dev;

  static NoiseModel uniform(std::size_t n_nodes, double std_dev = 1.0) {
    return {std::vector<double>(n_nodes, std_dev)};
  }
  // A zero deviation gives a degenerate (non absolutely continuous) law.
  bool has_positive_density() const;
};

// Sample path y_0 .. y_n; column k of `states` is y_k.
struct Trajectory {
  Eigen::MatrixXd states;
  std::uint64_t seed = 0;
  std::string triple_id;

  std::size_t n_nodes() const { return static_cast<std::size_t>(states.rows()); }
  // Number of transitions n (the path holds n + 1 states).
  std::size_t n_steps() const { return states.cols() > 0 ? static_cast<std::size_t>(states.cols() - 1) : 0; }
  auto state(std::size_t k) const { return states.col(static_cast<Eigen::Index>(k)); }
};

// |state| beyond this is treated as divergence.
inline constexpr double kDivergenceBound = 1e12;

// Innovation x_epoch. Every epoch draws from its own substream
// derive_seed(seed, epoch), so paths do not depend on evaluation order.
Eigen::VectorXd draw_noise(const NoiseModel& noise, std::uint64_t seed, std::size_t epoch);

// Forward simulation of n_steps transitions starting at y0. Throws
// DivergenceError on the first non-finite or exploding state.
Trajectory simulate(const CombinationMatrix& a, const NonlinearityTriple& triple,
                    const NoiseModel& noise, const Eigen::VectorXd& y0, std::size_t n_steps,
                    std::uint64_t seed);

// z_k = sigma^{-1}(y_k) componentwise (additive-noise representation).
Trajectory transform_to_additive(const Trajectory& traj, const NonlinearityTriple& triple);

// Rows of `traj` listed in `nodes`, in that order.
Trajectory project(const Trajectory& traj, const std::vector<std::size_t>& nodes);

}  // namespace ggnet

#endif  // GGNET_DYNAMICS_H
