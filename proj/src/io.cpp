#include "ggnet/io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "ggnet/error.h"

namespace ggnet::io {
namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return in;
}

void check_written(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("write to " + path.string() + " failed");
}

double parse_double(const std::string& token, const fs::path& path, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  // stod stops at trailing garbage; only whitespace may follow.
  if (used == 0 || token.find_first_not_of(" \t\r", used) != std::string::npos)
    throw IoError(path.string() + ":" + std::to_string(line) + ": bad number '" + token + "'");
  return v;
}

std::vector<double> parse_row(const std::string& text, const fs::path& path, std::size_t line) {
  std::vector<double> row;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) row.push_back(parse_double(cell, path, line));
  return row;
}

// Value of "key=<v>" inside a header line.
std::string header_field(const std::string& header, const std::string& key, const fs::path& path) {
  const std::string tag = key + "=";
  const auto pos = header.find(tag);
  if (pos == std::string::npos) throw IoError(path.string() + ": header lacks '" + key + "'");
  const auto start = pos + tag.size();
  const auto end = header.find_first_of(", \t\r", start);
  return header.substr(start, end == std::string::npos ? std::string::npos : end - start);
}

std::uint64_t parse_u64(const std::string& s, const fs::path& path) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw IoError(path.string() + ": bad integer '" + s + "'");
  return v;
}

void write_row(std::ostream& out, const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    if (j) out << ',';
    out << format_double(row(j));
  }
  out << '\n';
}

nlohmann::json optional_number(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) {
    if (v && std::isinf(*v)) return "inf";
    return nullptr;
  }
  return *v;
}

nlohmann::json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, p);
}

void write_graph(const fs::path& path, const DirectedGraph& graph) {
  auto out = open_out(path);
  out << "# N=" << graph.n_nodes() << '\n';
  for (const auto& [i, j] : graph.edges()) out << i + 1 << ',' << j + 1 << '\n';
  check_written(out, path);
}

DirectedGraph read_graph(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("#", 0) != 0) throw IoError(path.string() + ": missing '# N=' header");
  const auto n = parse_u64(header_field(line, "N", path), path);
  if (n == 0) throw IoError(path.string() + ": N must be >= 1");
  DirectedGraph graph(n, true);
  bool self_loops = false;
  std::vector<DirectedGraph::Edge> edges;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected 'i,j'");
    auto trim = [](std::string s) {
      s.erase(s.find_last_not_of(" \t\r") + 1);
      s.erase(0, s.find_first_not_of(" \t"));
      return s;
    };
    const auto i = parse_u64(trim(line.substr(0, comma)), path);
    const auto j = parse_u64(trim(line.substr(comma + 1)), path);
    if (i < 1 || j < 1 || i > n || j > n)
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": index out of [1, N]");
    if (graph.has_edge(i - 1, j - 1))
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": duplicate edge");
    graph.add_edge(i - 1, j - 1);
    self_loops = self_loops || i == j;
    edges.emplace_back(i - 1, j - 1);
  }
  if (self_loops) return graph;
  DirectedGraph plain(n);
  for (const auto& [i, j] : edges) plain.add_edge(i, j);
  return plain;
}

void write_matrix(const fs::path& path, const Eigen::MatrixXd& m) {
  auto out = open_out(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) write_row(out, m.row(i));
  check_written(out, path);
}

Eigen::MatrixXd read_matrix(const fs::path& path) {
  auto in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    rows.push_back(parse_row(line, path, lineno));
    if (rows.back().size() != rows.front().size()) throw IoError(path.string() + ": ragged rows");
  }
  if (rows.empty()) throw IoError(path.string() + ": empty matrix");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

void write_trajectory(const fs::path& path, const Trajectory& traj) {
  auto out = open_out(path);
  out << "# N=" << traj.n_nodes() << ", steps=" << traj.n_steps() << ", seed=" << traj.seed << '\n';
  for (Eigen::Index k = 0; k < traj.states.cols(); ++k) write_row(out, traj.states.col(k).transpose());
  check_written(out, path);
}

Trajectory read_trajectory(const fs::path& path) {
  auto in = open_in(path);
  std::string header;
  if (!std::getline(in, header) || header.rfind("#", 0) != 0)
    throw IoError(path.string() + ": missing trajectory header");
  const auto n = parse_u64(header_field(header, "N", path), path);
  const auto steps = parse_u64(header_field(header, "steps", path), path);
  Trajectory traj;
  traj.seed = parse_u64(header_field(header, "seed", path), path);
  traj.states.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(steps + 1));
  std::string line;
  std::size_t k = 0, lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    if (k > steps) throw IoError(path.string() + ": more rows than steps + 1");
    const auto row = parse_row(line, path, lineno);
    if (row.size() != n) throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected N values");
    for (std::size_t i = 0; i < n; ++i)
      traj.states(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[i];
    ++k;
  }
  if (k != steps + 1) throw IoError(path.string() + ": expected steps + 1 rows");
  return traj;
}

void write_lag_matrices(const fs::path& dir, const std::string& stem, const LagMatrices& lag) {
  write_matrix(dir / (stem + "_f0_sum.csv"), lag.f0_sum());
  write_matrix(dir / (stem + "_f1_sum.csv"), lag.f1_sum());
  auto out = open_out(dir / (stem + ".meta"));
  out << "# count=" << lag.count() << '\n';
  check_written(out, dir / (stem + ".meta"));
}

LagMatrices read_lag_matrices(const fs::path& dir, const std::string& stem) {
  const fs::path meta = dir / (stem + ".meta");
  auto in = open_in(meta);
  std::string line;
  if (!std::getline(in, line)) throw IoError(meta.string() + ": empty");
  const auto count = parse_u64(header_field(line, "count", meta), meta);
  return LagMatrices::from_sums(read_matrix(dir / (stem + "_f0_sum.csv")),
                                read_matrix(dir / (stem + "_f1_sum.csv")), count);
}

void write_profile(const fs::path& path, const std::vector<ProfileEntry>& profile) {
  auto out = open_out(path);
  out << "slot,true,estimate\n";
  for (const auto& e : profile)
    out << e.slot << ',' << format_double(e.true_value) << ',' << format_double(e.est_value) << '\n';
  check_written(out, path);
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  check_written(out, path);
}

nlohmann::json read_json(const fs::path& path) {
  auto in = open_in(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON in ") + path.string() + ": " + e.what());
  }
}

nlohmann::json to_json(const EstimateReport& rep, const std::string& matrix_file) {
  nlohmann::json j;
  j["estimator"] = to_string(rep.kind);
  j["n_samples"] = rep.n_samples;
  j["cond_F0"] = optional_number(rep.cond_f0);
  if (rep.observed_set) {
    nlohmann::json s = nlohmann::json::array();
    for (auto i : *rep.observed_set) s.push_back(i + 1);
    j["observed_set"] = s;
  } else {
    j["observed_set"] = nullptr;
  }
  j["matrix"] = matrix_file;
  return j;
}

nlohmann::json to_json(const RecoveryMetrics& m) {
  return {{"false_edges", m.false_edges},
          {"missed_edges", m.missed_edges},
          {"total_offdiag", m.total_offdiag},
          {"edge_error_rate", m.edge_error_rate},
          {"matrix_rel_error", finite_or_null(m.matrix_rel_error)},
          {"identifiability_gap", finite_or_null(m.identifiability_gap)}};
}

nlohmann::json to_json(const AssumptionReport& r) {
  nlohmann::json j;
  j["kappa_s"] = optional_number(r.kappa_s);
  j["kappa_branch"] = r.kappa_branch ? nlohmann::json(*r.kappa_branch) : nlohmann::json(nullptr);
  j["stability_sufficient"] =
      r.stability_sufficient ? nlohmann::json(*r.stability_sufficient) : nlohmann::json(nullptr);
  j["sigma_invertible"] = r.sigma_invertible;
  j["pq_sum_ok"] = r.pq_sum_ok;
  j["p"] = optional_number(r.p);
  j["q"] = optional_number(r.q);
  j["f0_condition"] = optional_number(r.f0_condition);
  j["omega_moment_flag"] = r.omega_moment_flag ? nlohmann::json(*r.omega_moment_flag) : nlohmann::json(nullptr);
  j["omega_moment_ratio"] = optional_number(r.omega_moment_ratio);
  j["notes"] = r.notes;
  return j;
}

nlohmann::json to_json(const ClusterSplit& s) {
  return {{"threshold", s.threshold},         {"low_centroid", s.low_centroid},
          {"high_centroid", s.high_centroid}, {"within_sse", s.within_sse},
          {"low_count", s.low_count},         {"high_count", s.high_count},
          {"explained", s.explained},         {"near_degenerate", s.near_degenerate()}};
}

}  // namespace ggnet::io
