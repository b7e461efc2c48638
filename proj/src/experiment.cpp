#include "ggnet/experiment.h"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>

#include "ggnet/error.h"
#include "ggnet/io.h"
#include "ggnet/rng.h"

namespace ggnet {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::size_t kTrajectorySizeGate = 100000;

bool is_partial(EstimatorKind k) {
  return k == EstimatorKind::egg_partial || k == EstimatorKind::granger_partial;
}

Eigen::MatrixXd restrict(const Eigen::MatrixXd& m, const std::vector<std::size_t>& nodes) {
  const auto s = static_cast<Eigen::Index>(nodes.size());
  Eigen::MatrixXd out(s, s);
  for (Eigen::Index r = 0; r < s; ++r)
    for (Eigen::Index c = 0; c < s; ++c)
      out(r, c) = m(static_cast<Eigen::Index>(nodes[r]), static_cast<Eigen::Index>(nodes[c]));
  return out;
}

// (1/n) sum_k h(y_k) h(y_k)^T, needing neither omega nor sigma^{-1}.
Eigen::MatrixXd f0_from_h(const Trajectory& traj, const NonlinearityTriple& triple) {
  const std::size_t n = traj.n_nodes();
  const std::size_t steps = traj.n_steps();
  Eigen::MatrixXd hv(n, steps);
  for (std::size_t k = 0; k < steps; ++k)
    for (std::size_t i = 0; i < n; ++i)
      hv(i, k) = triple.h()[i](traj.states(i, k));
  return hv * hv.transpose() / static_cast<double>(steps);
}

void record(ExperimentResult& res, const std::string& context, const std::exception& e) {
  res.errors.push_back(context + ": " + e.what());
  if (res.exit_code == kExitOk) res.exit_code = exit_code_for(e);
}

void record(ExperimentResult& res, EstimatorOutcome& out, const std::exception& e) {
  out.error = e.what();
  out.error_code = exit_code_for(e);
  record(res, to_string(out.kind), e);
}

AssumptionReport build_assumptions(const ExperimentConfig& cfg, const Trajectory& traj,
                                   const CombinationMatrix& a, const std::optional<LagMatrices>& lag) {
  const auto& triple = cfg.nonlinearities();
  AssumptionReport rep;
  std::vector<std::string> pre_notes;
  try {
    const Eigen::MatrixXd f0 = lag && lag->count() > 0 ? finalize(*lag).f0_hat : f0_from_h(traj, triple);
    rep = assumption_report(traj, triple, cfg.weighting, f0);
  } catch (const Error& e) {
    rep.sigma_invertible = true;
    pre_notes.push_back(std::string("data checks incomplete: ") + e.what());
  }
  try {
    const AssumptionReport st = stability_constant(triple, a, cfg.kappa_norm);
    rep.kappa_s = st.kappa_s;
    rep.kappa_branch = st.kappa_branch;
    rep.stability_sufficient = st.stability_sufficient;
    rep.notes.insert(rep.notes.end(), st.notes.begin(), st.notes.end());
  } catch (const ConfigError& e) {
    pre_notes.push_back(std::string("stability constant unavailable: ") + e.what());
  }
  rep.notes.insert(rep.notes.end(), pre_notes.begin(), pre_notes.end());
  return rep;
}

void score_outcome(EstimatorOutcome& out, const Eigen::MatrixXd& a_true) {
  const Eigen::MatrixXd& a_hat = out.report->a_hat;
  const DirectedGraph truth = support_offdiagonal(a_true);
  out.profile = sorted_entry_profile(a_true, a_hat);
  out.profile_stats = profile_stats(out.profile);
  out.split = offdiagonal_split(a_hat);
  out.metrics = score(classify_edges(a_hat), truth, a_hat, a_true);
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
  if (dynamic_cast<const NumericalError*>(&e)) return kExitNumerical;
  if (dynamic_cast<const IoError*>(&e)) return kExitIo;
  return kExitInternal;
}

const EstimatorOutcome* ExperimentResult::find(EstimatorKind kind) const {
  for (const auto& o : outcomes)
    if (o.kind == kind) return &o;
  return nullptr;
}

Network build_network(const ExperimentConfig& cfg) {
  DirectedGraph graph = generate_binomial_graph(cfg.graph.n_nodes, cfg.graph.p, cfg.graph.seed);
  CombinationMatrix a = build_combination_matrix(graph, cfg.rho);
  return {std::move(graph), std::move(a)};
}

ExperimentResult analyze(const ExperimentConfig& cfg, const Network& net, Trajectory traj) {
  const auto& triple = cfg.nonlinearities();
  if (traj.n_nodes() != triple.n_nodes())
    throw ConfigError("trajectory has " + std::to_string(traj.n_nodes()) + " nodes, config has " +
                          std::to_string(triple.n_nodes()),
                      "graph.n_nodes");
  ExperimentResult res(net);
  const CombinationMatrix& a = res.a;

  const bool wants_egg = std::find(cfg.estimators.begin(), cfg.estimators.end(), EstimatorKind::egg) !=
                         cfg.estimators.end();
  std::optional<std::string> lag_error;
  std::optional<int> lag_code;
  if (wants_egg) {
    try {
      res.lag = accumulate_trajectory(traj, triple, cfg.weighting);
    } catch (const Error& e) {
      lag_error = e.what();
      lag_code = exit_code_for(e);
    }
  }
  res.assumptions = build_assumptions(cfg, traj, a, res.lag);

  for (EstimatorKind kind : cfg.estimators) {
    EstimatorOutcome out;
    out.kind = kind;
    try {
      switch (kind) {
        case EstimatorKind::egg: {
          if (lag_error) {
            out.error = *lag_error;
            out.error_code = *lag_code;
            res.errors.push_back("egg: " + *lag_error);
            if (res.exit_code == kExitOk) res.exit_code = *lag_code;
            break;
          }
          const LagEstimates est = finalize(*res.lag);
          out.report = egg_estimate(est.f0_hat, est.f1_hat, cfg.cond_limit);
          out.report->n_samples = res.lag->count();
          break;
        }
        case EstimatorKind::granger: out.report = granger_estimate(traj, cfg.cond_limit); break;
        case EstimatorKind::correlation: out.report = correlation_estimate(traj); break;
        case EstimatorKind::precision: out.report = precision_estimate(traj, cfg.cond_limit); break;
        case EstimatorKind::least_squares:
          out.report = least_squares_estimate(traj, triple, cfg.weighting, cfg.cond_limit);
          break;
        case EstimatorKind::egg_partial:
        case EstimatorKind::granger_partial: {
          if (!cfg.observed_set) throw ConfigError("partial estimators need observed_set", "observed_set");
          const PartialObservation obs = observe(traj, *cfg.observed_set);
          out.report = partial_estimate(obs, kind, triple, cfg.weighting, cfg.cond_limit);
          break;
        }
      }
      if (out.report) {
        const Eigen::MatrixXd a_true =
            is_partial(kind) ? restrict(a.entries, *cfg.observed_set) : a.entries;
        score_outcome(out, a_true);
      }
    } catch (const Error& e) {
      record(res, out, e);
    }
    res.outcomes.push_back(std::move(out));
  }
  res.trajectory = std::move(traj);
  return res;
}

ExperimentResult execute(const ExperimentConfig& cfg) {
  Network net = build_network(cfg);
  Trajectory traj;
  try {
    traj = simulate(net.a, cfg.nonlinearities(), cfg.noise(), cfg.initial_state(), cfg.sim.n_steps, cfg.sim.seed);
  } catch (const Error& e) {
    ExperimentResult res(std::move(net));
    try {
      res.assumptions = stability_constant(cfg.nonlinearities(), res.a, cfg.kappa_norm);
    } catch (const ConfigError&) {
    }
    record(res, "simulate", e);
    return res;
  }
  return analyze(cfg, net, std::move(traj));
}

void write_results(const ExperimentConfig& cfg, const ExperimentResult& res, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  io::write_json(dir / "config.expanded.json", to_json(cfg));
  io::write_graph(dir / "graph.csv", res.graph);
  io::write_matrix(dir / "A.csv", res.a.entries);
  if (res.trajectory && (cfg.save_trajectory || res.trajectory->n_steps() <= kTrajectorySizeGate))
    io::write_trajectory(dir / "trajectory.csv", *res.trajectory);
  if (res.lag) io::write_lag_matrices(dir, "lag", *res.lag);
  io::write_json(dir / "assumptions.json", io::to_json(res.assumptions));

  json summary;
  summary["exit_code"] = res.exit_code;
  summary["errors"] = res.errors;
  json per = json::object();
  for (const auto& o : res.outcomes) {
    const std::string name = to_string(o.kind);
    json entry;
    entry["status"] = o.error.empty() ? "ok" : "error";
    if (!o.error.empty()) entry["error"] = o.error;
    if (o.report) {
      const std::string matrix_file = "estimate_" + name + ".csv";
      io::write_matrix(dir / matrix_file, o.report->a_hat);
      io::write_json(dir / ("estimate_" + name + ".json"), io::to_json(*o.report, matrix_file));
    }
    if (o.metrics) {
      json rec = io::to_json(*o.metrics);
      if (o.split) rec["split"] = io::to_json(*o.split);
      if (o.profile_stats)
        rec["profile"] = {{"mean_offset", o.profile_stats->mean_offset},
                          {"oscillation", o.profile_stats->oscillation}};
      io::write_json(dir / ("recovery_" + name + ".json"), rec);
      io::write_profile(dir / ("profile_" + name + ".csv"), o.profile);
      entry["metrics"] = io::to_json(*o.metrics);
    }
    per[name] = entry;
  }
  summary["estimators"] = per;
  io::write_json(dir / "summary.json", summary);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const fs::path& dir) {
  ExperimentResult res = execute(cfg);
  write_results(cfg, res, dir);
  return res;
}

ExperimentConfig sweep_point_config(const ExperimentConfig& cfg, std::size_t k) {
  if (!cfg.sweep) throw ConfigError("missing", "sweep");
  if (k >= cfg.sweep->values.size()) throw std::invalid_argument("sweep_point_config: point out of range");
  ExperimentConfig p = cfg;
  p.sweep.reset();
  const double v = cfg.sweep->values[k];
  if (!cfg.sweep->shared_seed) p.sim.seed = derive_seed(cfg.sim.seed, k);
  switch (cfg.sweep->axis) {
    case SweepAxis::n_steps: p.sim.n_steps = static_cast<std::size_t>(v); break;
    case SweepAxis::delta:
      p.weighting.mode = WeightingMode::regularized;
      p.weighting.delta = v;
      break;
    case SweepAxis::observed_size: {
      std::vector<std::size_t> nodes(static_cast<std::size_t>(v));
      std::iota(nodes.begin(), nodes.end(), std::size_t{0});
      p.observed_set = std::move(nodes);
      break;
    }
  }
  return p;
}

namespace {

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::string metric_cell(const std::optional<double>& v) { return v ? io::format_double(*v) : std::string(); }

void write_summary_csv(const fs::path& path, const SweepResult& sr, SweepAxis axis) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "point," << to_string(axis)
      << ",seed,estimator,edge_error_rate,matrix_rel_error,identifiability_gap,mean_offset,oscillation,error\n";
  for (const auto& r : sr.rows) {
    std::optional<double> err, rel, gap, off, osc;
    if (r.metrics) {
      err = r.metrics->edge_error_rate;
      rel = r.metrics->matrix_rel_error;
      gap = r.metrics->identifiability_gap;
    }
    if (r.profile_stats) {
      off = r.profile_stats->mean_offset;
      osc = r.profile_stats->oscillation;
    }
    out << r.point << ',' << io::format_double(r.value) << ',' << r.seed << ',' << to_string(r.kind) << ','
        << metric_cell(err) << ',' << metric_cell(rel) << ',' << metric_cell(gap) << ',' << metric_cell(off)
        << ',' << metric_cell(osc) << ',' << (r.error.empty() ? std::string() : csv_quote(r.error)) << '\n';
  }
  if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& cfg, const fs::path& dir) {
  if (!cfg.sweep) throw ConfigError("missing", "sweep");
  if (cfg.sweep->values.empty()) throw ConfigError("axis has no values", "sweep.values");
  if (cfg.sweep->axis == SweepAxis::observed_size &&
      std::none_of(cfg.estimators.begin(), cfg.estimators.end(), is_partial))
    throw ConfigError("observed_size sweeps need egg_partial or granger_partial", "estimators");

  const std::size_t n_points = cfg.sweep->values.size();
  std::vector<std::vector<SweepRow>> rows(n_points);
  std::vector<int> codes(n_points, kExitOk);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t k = next++; k < n_points; k = next++) {
      const ExperimentConfig p = sweep_point_config(cfg, k);
      auto make_row = [&](EstimatorKind kind) {
        SweepRow row;
        row.point = k;
        row.value = cfg.sweep->values[k];
        row.seed = p.sim.seed;
        row.kind = kind;
        return row;
      };
      try {
        ExperimentResult res = execute(p);
        if (!dir.empty()) write_results(p, res, dir / ("point_" + std::to_string(k)));
        codes[k] = res.exit_code;
        if (res.outcomes.empty()) {
          for (auto kind : p.estimators) {
            SweepRow row = make_row(kind);
            row.error = res.errors.empty() ? "no result" : res.errors.front();
            rows[k].push_back(row);
          }
        }
        for (const auto& o : res.outcomes) {
          SweepRow row = make_row(o.kind);
          row.metrics = o.metrics;
          row.profile_stats = o.profile_stats;
          row.error = o.error;
          rows[k].push_back(row);
        }
      } catch (const std::exception& e) {
        codes[k] = exit_code_for(e);
        for (auto kind : p.estimators) {
          SweepRow row = make_row(kind);
          row.error = e.what();
          rows[k].push_back(row);
        }
      }
    }
  };

  const std::size_t n_workers = std::max<std::size_t>(1, std::min(cfg.workers, n_points));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }

  SweepResult sr;
  for (std::size_t k = 0; k < n_points; ++k) {
    sr.rows.insert(sr.rows.end(), rows[k].begin(), rows[k].end());
    if (sr.exit_code == kExitOk) sr.exit_code = codes[k];
  }
  if (!dir.empty()) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    io::write_json(dir / "config.expanded.json", to_json(cfg));
    write_summary_csv(dir / "summary.csv", sr, cfg.sweep->axis);
  }
  return sr;
}

}  // namespace ggnet
