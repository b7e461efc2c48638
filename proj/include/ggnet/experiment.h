#ifndef GGNET_EXPERIMENT_H
#define GGNET_EXPERIMENT_H

#include <cstddef>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ggnet/config.h"
#include "ggnet/dynamics.h"
#include "ggnet/estimators.h"
#include "ggnet/lagfun.h"
#include "ggnet/netgen.h"
#include "ggnet/recovery.h"

namespace ggnet {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitIo = 4;

// ConfigError -> 2, NumericalError -> 3, IoError -> 4, anything else -> 1.
int exit_code_for(const std::exception& e);

struct EstimatorOutcome {
  EstimatorKind kind = EstimatorKind::egg;
  std::optional<EstimateReport> report;
  std::optional<ClusterSplit> split;
  std::optional<RecoveryMetrics> metrics;
  std::optional<ProfileStats> profile_stats;
  std::vector<ProfileEntry> profile;
  std::string error;  // empty on success
  int error_code = kExitOk;
};

struct Network {
  DirectedGraph graph;
  CombinationMatrix a;
};

Network build_network(const ExperimentConfig& cfg);

struct ExperimentResult {
  explicit ExperimentResult(Network net) : graph(std::move(net.graph)), a(std::move(net.a)) {}

  DirectedGraph graph;
  CombinationMatrix a;
  std::optional<Trajectory> trajectory;
  std::optional<LagMatrices> lag;  // full-network lag sums, when EGG ran
  AssumptionReport assumptions;
  std::vector<EstimatorOutcome> outcomes;
  std::vector<std::string> errors;
  int exit_code = kExitOk;

  const EstimatorOutcome* find(EstimatorKind kind) const;
};

// Runs every configured estimator on an existing trajectory and scores it
// against `a`. Estimator failures are recorded, not thrown.
ExperimentResult analyze(const ExperimentConfig& cfg, const Network& net, Trajectory traj);

// Generate, simulate and analyze in memory. A simulation failure ends the
// run with the error recorded.
ExperimentResult execute(const ExperimentConfig& cfg);

// Writes all artifacts of a finished run into `dir` (created if needed).
void write_results(const ExperimentConfig& cfg, const ExperimentResult& res, const std::filesystem::path& dir);

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& dir);

struct SweepRow {
  std::size_t point = 0;
  double value = 0.0;
  std::uint64_t seed = 0;
  EstimatorKind kind = EstimatorKind::egg;
  std::optional<RecoveryMetrics> metrics;
  std::optional<ProfileStats> profile_stats;
  std::string error;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // ordered by point, then estimator
  int exit_code = kExitOk;
};

// Config of sweep point k.
ExperimentConfig sweep_point_config(const ExperimentConfig& cfg, std::size_t k);

// Runs every point of cfg.sweep on up to cfg.workers threads. Point k
// writes into dir/point_<k>; dir/summary.csv collects the rows. An empty
// `dir` keeps everything in memory.
SweepResult run_sweep(const ExperimentConfig& cfg, const std::filesystem::path& dir);

}  // namespace ggnet

#endif  // GGNET_EXPERIMENT_H
