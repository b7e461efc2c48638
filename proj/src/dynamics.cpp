#include "ggnet/dynamics.h"

#include <cmath>
#include <stdexcept>

#include <boost/random/normal_distribution.hpp>

#include "ggnet/error.h"
#include "ggnet/rng.h"

namespace ggnet {

bool NoiseModel::has_positive_density() const {
  for (double s : std_dev)
    if (!(s > 0.0)) return false;
  return !std_dev.empty();
}

Eigen::VectorXd draw_noise(const NoiseModel& noise, std::uint64_t seed, std::size_t epoch) {
  SplitMix64 gen(derive_seed(seed, epoch));
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd x(static_cast<Eigen::Index>(noise.std_dev.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = noise.std_dev[static_cast<std::size_t>(i)] * normal(gen);
  return x;
}

Trajectory simulate(const CombinationMatrix& a, const NonlinearityTriple& triple,
                    const NoiseModel& noise, const Eigen::VectorXd& y0, std::size_t n_steps,
                    std::uint64_t seed) {
  const std::size_t n = a.n_nodes();
  if (n == 0 || a.entries.cols() != a.entries.rows())
    throw std::invalid_argument("simulate: combination matrix must be square and nonempty");
  if (triple.n_nodes() != n || noise.std_dev.size() != n || static_cast<std::size_t>(y0.size()) != n)
    throw std::invalid_argument("simulate: dimension mismatch between A, triple, noise and y0");
  if (n_steps < 1) throw std::invalid_argument("simulate: n_steps must be >= 1");
  for (double s : noise.std_dev)
    if (!(s >= 0.0) || !std::isfinite(s))
      throw std::invalid_argument("simulate: noise standard deviations must be finite and >= 0");

  Trajectory traj;
  traj.seed = seed;
  traj.triple_id = triple.id();
  traj.states.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n_steps + 1));
  traj.states.col(0) = y0;

  const auto& sigma = triple.sigma();
  const auto& g = triple.g();
  const auto& h = triple.h();
  Eigen::VectorXd hv(static_cast<Eigen::Index>(n));
  Eigen::VectorXd coupled(static_cast<Eigen::Index>(n));

  for (std::size_t k = 0; k < n_steps; ++k) {
    const auto yk = traj.states.col(static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < n; ++i) hv(static_cast<Eigen::Index>(i)) = h[i](yk(static_cast<Eigen::Index>(i)));
    coupled.noalias() = a.entries * hv;
    const Eigen::VectorXd x = draw_noise(noise, seed, k + 1);
    auto next = traj.states.col(static_cast<Eigen::Index>(k + 1));
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const double v = sigma[i](g[i](yk(ii)) * coupled(ii) + x(ii));
      if (!std::isfinite(v) || std::abs(v) > kDivergenceBound) throw DivergenceError(k + 1, i, v);
      next(ii) = v;
    }
  }
  return traj;
}

Trajectory transform_to_additive(const Trajectory& traj, const NonlinearityTriple& triple) {
  if (triple.n_nodes() != traj.n_nodes())
    throw std::invalid_argument("transform_to_additive: dimension mismatch");
  Trajectory out = traj;
  const auto& sigma = triple.sigma();
  for (Eigen::Index k = 0; k < traj.states.cols(); ++k) {
    for (std::size_t i = 0; i < traj.n_nodes(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      try {
        out.states(ii, k) = sigma[i].inverse(traj.states(ii, k), i);
      } catch (const DomainError& e) {
        throw e.at_epoch(static_cast<std::size_t>(k));
      }
    }
  }
  return out;
}

Trajectory project(const Trajectory& traj, const std::vector<std::size_t>& nodes) {
  if (nodes.empty()) throw std::invalid_argument("project: node set must be nonempty");
  Trajectory out;
  out.seed = traj.seed;
  out.triple_id = traj.triple_id;
  out.states.resize(static_cast<Eigen::Index>(nodes.size()), traj.states.cols());
  for (std::size_t r = 0; r < nodes.size(); ++r) {
    if (nodes[r] >= traj.n_nodes()) throw std::invalid_argument("project: node index out of range");
    out.states.row(static_cast<Eigen::Index>(r)) = traj.states.row(static_cast<Eigen::Index>(nodes[r]));
  }
  return out;
}

}  // namespace ggnet
