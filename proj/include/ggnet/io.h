#ifndef GGNET_IO_H
#define GGNET_IO_H

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "ggnet/dynamics.h"
#include "ggnet/estimators.h"
#include "ggnet/lagfun.h"
#include "ggnet/netgen.h"
#include "ggnet/recovery.h"

namespace ggnet::io {

// Files use 1-based node indices; in memory everything is 0-based.
//
// graph:      "# N=<n>" then one "i,j" line per edge (j influences i)
// matrix:     N rows of N comma-separated values, 17 significant digits
// trajectory: "# N=<n>, steps=<k>, seed=<s>" then k+1 rows of N values
// lag sums:   <stem>_f0_sum.csv, <stem>_f1_sum.csv, <stem>.meta ("# count=<n>")
// All writers throw IoError when the file cannot be written; readers also
// on malformed content.

void write_graph(const std::filesystem::path& path, const DirectedGraph& graph);
DirectedGraph read_graph(const std::filesystem::path& path);

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix(const std::filesystem::path& path);

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj);
Trajectory read_trajectory(const std::filesystem::path& path);

void write_lag_matrices(const std::filesystem::path& dir, const std::string& stem, const LagMatrices& lag);
LagMatrices read_lag_matrices(const std::filesystem::path& dir, const std::string& stem);

void write_profile(const std::filesystem::path& path, const std::vector<ProfileEntry>& profile);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

// `matrix_file` is recorded as given (normally relative to the report).
nlohmann::json to_json(const EstimateReport& rep, const std::string& matrix_file);
nlohmann::json to_json(const RecoveryMetrics& m);
nlohmann::json to_json(const AssumptionReport& r);
nlohmann::json to_json(const ClusterSplit& s);

std::string format_double(double v);

}  // namespace ggnet::io

#endif  // GGNET_IO_H
