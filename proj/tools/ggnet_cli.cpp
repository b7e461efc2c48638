#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ggnet/config.h"
#include "ggnet/error.h"
#include "ggnet/experiment.h"
#include "ggnet/io.h"

namespace fs = std::filesystem;
using namespace ggnet;

namespace {

struct CommonFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_workers) {
  cmd->add_option("--config", f.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "output directory (default: config 'outputs')");
  cmd->add_option("--seed", f.seed, "override the seed (graph seed for generate, simulation seed otherwise)");
  if (with_workers) cmd->add_option("--workers", f.workers, "sweep worker threads")->check(CLI::PositiveNumber);
}

ExperimentConfig load(const CommonFlags& f, bool seed_is_graph) {
  ExperimentConfig cfg = load_config(f.config);
  if (f.seed) (seed_is_graph ? cfg.graph.seed : cfg.sim.seed) = *f.seed;
  if (f.workers) cfg.workers = *f.workers;
  return cfg;
}

fs::path out_dir(const CommonFlags& f, const ExperimentConfig& cfg) {
  return f.out.empty() ? fs::path(cfg.outputs) : fs::path(f.out);
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

void report(const ExperimentResult& res, const fs::path& dir) {
  for (const auto& o : res.outcomes) {
    std::cout << to_string(o.kind) << ": ";
    if (o.metrics)
      std::cout << "edge_error_rate=" << io::format_double(o.metrics->edge_error_rate)
                << " matrix_rel_error=" << io::format_double(o.metrics->matrix_rel_error)
                << " gap=" << io::format_double(o.metrics->identifiability_gap);
    if (!o.error.empty()) std::cout << (o.metrics ? " " : "") << "error: " << o.error;
    std::cout << '\n';
  }
  for (const auto& e : res.errors) std::cerr << "error: " << e << '\n';
  std::cout << "results in " << dir.string() << '\n';
}

int cmd_generate(const CommonFlags& f) {
  const ExperimentConfig cfg = load(f, true);
  const Network net = build_network(cfg);
  const fs::path dir = out_dir(f, cfg);
  make_dir(dir);
  io::write_graph(dir / "graph.csv", net.graph);
  io::write_matrix(dir / "A.csv", net.a.entries);
  io::write_json(dir / "config.expanded.json", to_json(cfg));
  std::cout << net.graph.n_edges() << " edges on " << net.graph.n_nodes() << " nodes written to " << dir.string() << '\n';
  return kExitOk;
}

int cmd_simulate(const CommonFlags& f) {
  const ExperimentConfig cfg = load(f, false);
  const Network net = build_network(cfg);
  const Trajectory traj =
      simulate(net.a, cfg.nonlinearities(), cfg.noise(), cfg.initial_state(), cfg.sim.n_steps, cfg.sim.seed);
  const fs::path dir = out_dir(f, cfg);
  make_dir(dir);
  io::write_graph(dir / "graph.csv", net.graph);
  io::write_matrix(dir / "A.csv", net.a.entries);
  io::write_trajectory(dir / "trajectory.csv", traj);
  io::write_json(dir / "config.expanded.json", to_json(cfg));
  std::cout << traj.n_steps() << " steps written to " << (dir / "trajectory.csv").string() << '\n';
  return kExitOk;
}

int cmd_estimate(const CommonFlags& f, const std::string& trajectory) {
  const ExperimentConfig cfg = load(f, false);
  const Network net = build_network(cfg);
  Trajectory traj = io::read_trajectory(trajectory);
  const ExperimentResult res = analyze(cfg, net, std::move(traj));
  const fs::path dir = out_dir(f, cfg);
  write_results(cfg, res, dir);
  report(res, dir);
  return res.exit_code;
}

int cmd_score(const std::string& estimate, const std::string& truth, const std::string& out) {
  const Eigen::MatrixXd a_hat = io::read_matrix(estimate);
  const Eigen::MatrixXd a = io::read_matrix(truth);
  if (a_hat.rows() != a.rows() || a_hat.cols() != a.cols())
    throw ConfigError("estimate and truth differ in size", "--estimate");
  const RecoveryMetrics m = score(classify_edges(a_hat), support_offdiagonal(a), a_hat, a);
  nlohmann::json j = io::to_json(m);
  j["split"] = io::to_json(offdiagonal_split(a_hat));
  if (!out.empty()) {
    make_dir(out);
    io::write_json(fs::path(out) / "recovery.json", j);
    io::write_profile(fs::path(out) / "profile.csv", sorted_entry_profile(a, a_hat));
  }
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_experiment(const CommonFlags& f) {
  const ExperimentConfig cfg = load(f, false);
  const fs::path dir = out_dir(f, cfg);
  const ExperimentResult res = run_experiment(cfg, dir);
  report(res, dir);
  return res.exit_code;
}

int cmd_sweep(const CommonFlags& f) {
  const ExperimentConfig cfg = load(f, false);
  if (!cfg.sweep) throw ConfigError("missing", "sweep");
  const fs::path dir = out_dir(f, cfg);
  const SweepResult sr = run_sweep(cfg, dir);
  for (const auto& r : sr.rows) {
    std::cout << "point " << r.point << " (" << to_string(cfg.sweep->axis) << '=' << io::format_double(r.value)
              << ") " << to_string(r.kind) << ": ";
    if (r.metrics)
      std::cout << "edge_error_rate=" << io::format_double(r.metrics->edge_error_rate)
                << " matrix_rel_error=" << io::format_double(r.metrics->matrix_rel_error);
    if (!r.error.empty()) std::cout << " error: " << r.error;
    std::cout << '\n';
  }
  std::cout << "summary in " << (dir / "summary.csv").string() << '\n';
  return sr.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Network topology inference for nonlinear networked stochastic systems"};
  app.require_subcommand(1);

  CommonFlags gen_f, sim_f, est_f, exp_f, sweep_f;
  auto* gen = app.add_subcommand("generate", "draw the graph and interaction matrix");
  add_common(gen, gen_f, false);
  auto* sim = app.add_subcommand("simulate", "simulate a trajectory");
  add_common(sim, sim_f, false);
  auto* est = app.add_subcommand("estimate", "run the estimators on a stored trajectory");
  add_common(est, est_f, false);
  std::string trajectory;
  est->add_option("--trajectory", trajectory, "trajectory CSV")->required()->check(CLI::ExistingFile);
  auto* sc = app.add_subcommand("score", "cluster an estimate and score it against the truth");
  std::string estimate_path, truth_path, score_out;
  sc->add_option("--estimate", estimate_path, "estimated matrix CSV")->required()->check(CLI::ExistingFile);
  sc->add_option("--truth", truth_path, "true matrix CSV")->required()->check(CLI::ExistingFile);
  sc->add_option("--out", score_out, "directory for recovery.json and profile.csv");
  auto* ex = app.add_subcommand("experiment", "generate, simulate, estimate and score");
  add_common(ex, exp_f, false);
  auto* sw = app.add_subcommand("sweep", "run an experiment over a parameter axis");
  add_common(sw, sweep_f, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*gen) return cmd_generate(gen_f);
    if (*sim) return cmd_simulate(sim_f);
    if (*est) return cmd_estimate(est_f, trajectory);
    if (*sc) return cmd_score(estimate_path, truth_path, score_out);
    if (*ex) return cmd_experiment(exp_f);
    if (*sw) return cmd_sweep(sweep_f);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kExitInternal;
}
