#ifndef GGNET_CONFIG_H
#define GGNET_CONFIG_H

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "ggnet/dynamics.h"
#include "ggnet/estimators.h"
#include "ggnet/lagfun.h"
#include "ggnet/nonlinearity.h"
#include "ggnet/recovery.h"

namespace ggnet {

// Named triples:
//   linear           sigma = id, g = 1, h = id
//   example1         sign(y)|y|^0.5, sign(y)|y|^0.3, sign(y)|y|^0.7
//   example2         tanh, sign(y)|y|^0.4, sin(4y) + sign(y)|y|^0.6
//   fig2-singular-g  sigma = id, g = y, h = tanh
//   fig3-singular-h  tanh (node 1 shifted by -2, node 2 by +2), sign(y)|y|^0.4,
//                    limiter(-1, 1)
NonlinearityTriple make_preset_triple(const std::string& name, std::size_t n_nodes);
std::vector<std::string> preset_names();

struct GraphSpec {
  std::size_t n_nodes = 50;
  double p = 0.2;
  std::uint64_t seed = 1;
};

struct SimSpec {
  std::size_t n_steps = 200000;
  std::uint64_t seed = 2;
  std::vector<double> y0;  // empty: zero vector
};

enum class SweepAxis { n_steps, delta, observed_size };
std::string to_string(SweepAxis axis);

struct SweepSpec {
  SweepAxis axis = SweepAxis::n_steps;
  std::vector<double> values;
  // Seeds of point k are derive_seed(sim.seed, k) unless shared.
  bool shared_seed = false;
};

struct ExperimentConfig {
  GraphSpec graph;
  double rho = 0.5;
  // Fully expanded per-node triple (presets are expanded at parse time).
  std::optional<NonlinearityTriple> triple;
  std::string triple_preset;  // provenance only
  std::vector<double> noise_std;
  SimSpec sim;
  WeightingConfig weighting;
  std::vector<EstimatorKind> estimators{EstimatorKind::egg, EstimatorKind::granger,
                                        EstimatorKind::correlation, EstimatorKind::precision};
  std::optional<std::vector<std::size_t>> observed_set;  // 0-based
  double cond_limit = kDefaultCondLimit;
  MatrixNorm kappa_norm = MatrixNorm::infinity;
  bool save_trajectory = false;
  std::string outputs = "run";
  std::optional<SweepSpec> sweep;
  std::size_t workers = 1;

  const NonlinearityTriple& nonlinearities() const { return *triple; }
  NoiseModel noise() const { return {noise_std}; }
  Eigen::VectorXd initial_state() const;
};

// Throws ConfigError naming the offending field.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

// Expanded, self-contained form (re-parses to the same config).
nlohmann::json to_json(const ExperimentConfig& cfg);
nlohmann::json to_json(const Nonlinearity& f);
Nonlinearity nonlinearity_from_json(const nlohmann::json& j, const std::string& field);

}  // namespace ggnet

#endif  // GGNET_CONFIG_H
