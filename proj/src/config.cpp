#include "ggnet/config.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "ggnet/error.h"

namespace ggnet {

using nlohmann::json;

NonlinearityTriple make_preset_triple(const std::string& name, std::size_t n) {
  if (n == 0) throw ConfigError("preset needs n_nodes >= 1", "graph.n_nodes");
  if (name == "linear")
    return NonlinearityTriple::uniform(n, Nonlinearity::identity(), Nonlinearity::constant_one(),
                                       Nonlinearity::identity(), name);
  if (name == "example1")
    return NonlinearityTriple::uniform(n, Nonlinearity::sign_power(0.5), Nonlinearity::sign_power(0.3),
                                       Nonlinearity::sign_power(0.7), name);
  if (name == "example2")
    return NonlinearityTriple::uniform(n, Nonlinearity::tanh(), Nonlinearity::sign_power(0.4),
                                       Nonlinearity::sin_plus_sign_power(4.0, 0.6), name);
  if (name == "fig2-singular-g")
    return NonlinearityTriple::uniform(n, Nonlinearity::identity(), Nonlinearity::identity(),
                                       Nonlinearity::tanh(), name);
  if (name == "fig3-singular-h") {
    if (n < 2) throw ConfigError("fig3-singular-h needs at least two nodes", "graph.n_nodes");
    std::vector<Nonlinearity> sigma(n, Nonlinearity::tanh());
    // Node 1 lives in (-3, -1), node 2 in (1, 3): both sit in the flat
    // parts of the limiter, so h_1 = -1 and h_2 = +1 along the whole path.
    sigma[0] = Nonlinearity::tanh_shifted(-2.0);
    sigma[1] = Nonlinearity::tanh_shifted(2.0);
    return NonlinearityTriple(std::move(sigma), std::vector<Nonlinearity>(n, Nonlinearity::sign_power(0.4)),
                              std::vector<Nonlinearity>(n, Nonlinearity::limiter(-1.0, 1.0)), name);
  }
  throw ConfigError("unknown preset '" + name + "'", "triple");
}

std::vector<std::string> preset_names() {
  return {"linear", "example1", "example2", "fig2-singular-g", "fig3-singular-h"};
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::n_steps: return "n_steps";
    case SweepAxis::delta: return "delta";
    case SweepAxis::observed_size: return "observed_size";
  }
  return "unknown";
}

Eigen::VectorXd ExperimentConfig::initial_state() const {
  if (sim.y0.empty()) return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(graph.n_nodes));
  return Eigen::Map<const Eigen::VectorXd>(sim.y0.data(), static_cast<Eigen::Index>(sim.y0.size()));
}

namespace {

void require_object(const json& j, const std::string& field) {
  if (!j.is_object()) throw ConfigError("expected an object", field);
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& prefix) {
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ConfigError("unknown key", prefix.empty() ? key : prefix + "." + key);
}

double get_number(const json& j, const std::string& key, const std::string& field) {
  if (!j.contains(key)) throw ConfigError("missing", field);
  if (!j.at(key).is_number()) throw ConfigError("expected a number", field);
  return j.at(key).get<double>();
}

double number_or(const json& j, const std::string& key, double fallback, const std::string& field) {
  return j.contains(key) ? get_number(j, key, field) : fallback;
}

std::uint64_t get_u64(const json& j, const std::string& key, std::uint64_t fallback, const std::string& field) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ConfigError("expected a nonnegative integer", field);
}

bool bool_or(const json& j, const std::string& key, bool fallback, const std::string& field) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) throw ConfigError("expected true or false", field);
  return j.at(key).get<bool>();
}

// Scalar broadcasts to all nodes; arrays must have n entries.
std::vector<double> per_node_numbers(const json& v, std::size_t n, const std::string& field) {
  if (v.is_number()) return std::vector<double>(n, v.get<double>());
  if (!v.is_array()) throw ConfigError("expected a number or an array", field);
  if (v.size() != n) throw ConfigError("expected " + std::to_string(n) + " entries", field);
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError("expected a number", field + "[" + std::to_string(i) + "]");
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::vector<Nonlinearity> family_from_json(const json& v, std::size_t n, const std::string& field) {
  if (v.is_array()) {
    if (v.size() != n) throw ConfigError("expected " + std::to_string(n) + " entries", field);
    std::vector<Nonlinearity> out;
    for (std::size_t i = 0; i < n; ++i)
      out.push_back(nonlinearity_from_json(v[i], field + "[" + std::to_string(i) + "]"));
    return out;
  }
  return std::vector<Nonlinearity>(n, nonlinearity_from_json(v, field));
}

}  // namespace

Nonlinearity nonlinearity_from_json(const json& j, const std::string& field) {
  json spec = j;
  if (spec.is_string()) spec = json{{"kind", spec}};
  require_object(spec, field);
  if (!spec.contains("kind") || !spec["kind"].is_string()) throw ConfigError("missing kind", field + ".kind");
  const NonlinearityKind kind = parse_nonlinearity_kind(spec["kind"].get<std::string>());
  std::set<std::string> known{"kind", "envelope"};
  std::optional<Nonlinearity> f;
  try {
    switch (kind) {
      case NonlinearityKind::identity: f = Nonlinearity::identity(); break;
      case NonlinearityKind::constant_one: f = Nonlinearity::constant_one(); break;
      case NonlinearityKind::tanh: f = Nonlinearity::tanh(); break;
      case NonlinearityKind::sign_power:
        known.insert("a");
        f = Nonlinearity::sign_power(get_number(spec, "a", field + ".a"));
        break;
      case NonlinearityKind::tanh_shifted:
        known.insert("c");
        f = Nonlinearity::tanh_shifted(get_number(spec, "c", field + ".c"));
        break;
      case NonlinearityKind::limiter: {
        known.insert({"lo", "hi"});
        const double lo = get_number(spec, "lo", field + ".lo");
        f = Nonlinearity::limiter(lo, get_number(spec, "hi", field + ".hi"));
        break;
      }
      case NonlinearityKind::sin_plus_sign_power:
        known.insert({"freq", "a"});
        const double freq = get_number(spec, "freq", field + ".freq");
        f = Nonlinearity::sin_plus_sign_power(freq, get_number(spec, "a", field + ".a"));
        break;
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), field);
  }
  reject_unknown(spec, known, field);
  if (spec.contains("envelope")) {
    const json& e = spec["envelope"];
    if (e.is_null()) return *f;
    require_object(e, field + ".envelope");
    reject_unknown(e, {"alpha", "beta", "exponent"}, field + ".envelope");
    Envelope env;
    env.alpha = get_number(e, "alpha", field + ".envelope.alpha");
    env.beta = get_number(e, "beta", field + ".envelope.beta");
    if (e.contains("exponent") && !e["exponent"].is_null())
      env.exponent = get_number(e, "exponent", field + ".envelope.exponent");
    try {
      return f->with_envelope(env);
    } catch (const ConfigError& err) {
      throw ConfigError(err.what(), field + ".envelope");
    }
  }
  return *f;
}

json to_json(const Nonlinearity& f) {
  json j{{"kind", to_string(f.kind())}};
  switch (f.kind()) {
    case NonlinearityKind::sign_power: j["a"] = f.param0(); break;
    case NonlinearityKind::tanh_shifted: j["c"] = f.param0(); break;
    case NonlinearityKind::limiter:
      j["lo"] = f.param0();
      j["hi"] = f.param1();
      break;
    case NonlinearityKind::sin_plus_sign_power:
      j["freq"] = f.param0();
      j["a"] = f.param1();
      break;
    default: break;
  }
  if (const auto& env = f.envelope()) {
    j["envelope"] = {{"alpha", env->alpha}, {"beta", env->beta},
                     {"exponent", env->exponent ? json(*env->exponent) : json(nullptr)}};
  } else {
    j["envelope"] = nullptr;
  }
  return j;
}

ExperimentConfig parse_config(const json& j) {
  require_object(j, "<root>");
  reject_unknown(j, {"graph", "weights", "triple", "noise", "sim", "weighting", "estimators", "observed_set",
                     "cond_limit", "kappa_norm", "save_trajectory", "outputs", "sweep", "workers", "provenance"},
                 "");
  ExperimentConfig cfg;

  if (j.contains("graph")) {
    const json& g = j["graph"];
    require_object(g, "graph");
    reject_unknown(g, {"n_nodes", "p", "seed"}, "graph");
    cfg.graph.n_nodes = get_u64(g, "n_nodes", cfg.graph.n_nodes, "graph.n_nodes");
    cfg.graph.p = number_or(g, "p", cfg.graph.p, "graph.p");
    cfg.graph.seed = get_u64(g, "seed", cfg.graph.seed, "graph.seed");
  }
  if (cfg.graph.n_nodes < 1) throw ConfigError("must be >= 1", "graph.n_nodes");
  if (!(cfg.graph.p >= 0.0 && cfg.graph.p <= 1.0)) throw ConfigError("must lie in [0, 1]", "graph.p");
  const std::size_t n = cfg.graph.n_nodes;

  if (j.contains("weights")) {
    require_object(j["weights"], "weights");
    reject_unknown(j["weights"], {"rho"}, "weights");
    cfg.rho = number_or(j["weights"], "rho", cfg.rho, "weights.rho");
  }
  if (!(cfg.rho > 0.0 && cfg.rho < 1.0)) throw ConfigError("must lie in (0, 1)", "weights.rho");

  if (!j.contains("triple")) throw ConfigError("missing", "triple");
  const json& t = j["triple"];
  try {
    if (t.is_string()) {
      cfg.triple_preset = t.get<std::string>();
      cfg.triple = make_preset_triple(cfg.triple_preset, n);
    } else {
      require_object(t, "triple");
      reject_unknown(t, {"preset", "id", "sigma", "g", "h"}, "triple");
      if (t.contains("sigma") || t.contains("g") || t.contains("h")) {
        for (const char* key : {"sigma", "g", "h"})
          if (!t.contains(key)) throw ConfigError("missing", std::string("triple.") + key);
        std::string id = t.value("id", std::string("custom"));
        if (t.contains("preset") && t["preset"].is_string()) cfg.triple_preset = t["preset"].get<std::string>();
        cfg.triple = NonlinearityTriple(family_from_json(t["sigma"], n, "triple.sigma"),
                                        family_from_json(t["g"], n, "triple.g"),
                                        family_from_json(t["h"], n, "triple.h"), id);
      } else if (t.contains("preset") && t["preset"].is_string()) {
        cfg.triple_preset = t["preset"].get<std::string>();
        cfg.triple = make_preset_triple(cfg.triple_preset, n);
      } else {
        throw ConfigError("expected a preset name or sigma/g/h lists", "triple");
      }
    }
  } catch (const ConfigError& e) {
    if (e.field().empty()) throw ConfigError(e.what(), "triple");
    throw;
  }

  cfg.noise_std.assign(n, 1.0);
  if (j.contains("noise")) {
    require_object(j["noise"], "noise");
    reject_unknown(j["noise"], {"std"}, "noise");
    if (j["noise"].contains("std")) cfg.noise_std = per_node_numbers(j["noise"]["std"], n, "noise.std");
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!(cfg.noise_std[i] > 0.0) || !std::isfinite(cfg.noise_std[i]))
      throw ConfigError("must be finite and > 0", "noise.std[" + std::to_string(i) + "]");

  if (j.contains("sim")) {
    const json& s = j["sim"];
    require_object(s, "sim");
    reject_unknown(s, {"n_steps", "seed", "y0"}, "sim");
    cfg.sim.n_steps = get_u64(s, "n_steps", cfg.sim.n_steps, "sim.n_steps");
    cfg.sim.seed = get_u64(s, "seed", cfg.sim.seed, "sim.seed");
    if (s.contains("y0")) cfg.sim.y0 = per_node_numbers(s["y0"], n, "sim.y0");
  }
  if (cfg.sim.n_steps < 1) throw ConfigError("must be >= 1", "sim.n_steps");
  if (cfg.sim.y0.empty()) cfg.sim.y0.assign(n, 0.0);

  if (j.contains("weighting")) {
    const json& w = j["weighting"];
    require_object(w, "weighting");
    reject_unknown(w, {"mode", "delta", "singular_tol"}, "weighting");
    if (w.contains("mode")) {
      if (!w["mode"].is_string()) throw ConfigError("expected a string", "weighting.mode");
      cfg.weighting.mode = parse_weighting_mode(w["mode"].get<std::string>());
    }
    cfg.weighting.delta = number_or(w, "delta", 0.0, "weighting.delta");
    cfg.weighting.singular_tol = number_or(w, "singular_tol", 0.0, "weighting.singular_tol");
  }
  cfg.weighting.validate();

  if (j.contains("estimators")) {
    const json& e = j["estimators"];
    if (!e.is_array() || e.empty()) throw ConfigError("expected a nonempty array", "estimators");
    cfg.estimators.clear();
    for (std::size_t i = 0; i < e.size(); ++i) {
      const std::string field = "estimators[" + std::to_string(i) + "]";
      if (!e[i].is_string()) throw ConfigError("expected a string", field);
      try {
        cfg.estimators.push_back(parse_estimator_kind(e[i].get<std::string>()));
      } catch (const ConfigError& err) {
        throw ConfigError(err.what(), field);
      }
    }
  }

  if (j.contains("observed_set") && !j["observed_set"].is_null()) {
    const json& s = j["observed_set"];
    if (!s.is_array() || s.empty()) throw ConfigError("expected a nonempty array of 1-based node ids", "observed_set");
    std::vector<std::size_t> nodes;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const std::string field = "observed_set[" + std::to_string(i) + "]";
      if (!s[i].is_number_integer()) throw ConfigError("expected an integer", field);
      const auto v = s[i].get<std::int64_t>();
      if (v < 1 || static_cast<std::size_t>(v) > n) throw ConfigError("node id out of [1, N]", field);
      nodes.push_back(static_cast<std::size_t>(v - 1));
    }
    std::sort(nodes.begin(), nodes.end());
    if (std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end())
      throw ConfigError("duplicate node id", "observed_set");
    cfg.observed_set = std::move(nodes);
  }
  for (auto k : cfg.estimators)
    if ((k == EstimatorKind::egg_partial || k == EstimatorKind::granger_partial) && !cfg.observed_set)
      throw ConfigError("partial estimators need observed_set", "estimators");

  cfg.cond_limit = number_or(j, "cond_limit", cfg.cond_limit, "cond_limit");
  if (!(cfg.cond_limit > 1.0)) throw ConfigError("must be > 1", "cond_limit");
  if (j.contains("kappa_norm")) {
    const json& v = j["kappa_norm"];
    if (v == "infinity")
      cfg.kappa_norm = MatrixNorm::infinity;
    else if (v == "two")
      cfg.kappa_norm = MatrixNorm::two;
    else
      throw ConfigError("expected \"infinity\" or \"two\"", "kappa_norm");
  }
  cfg.save_trajectory = bool_or(j, "save_trajectory", false, "save_trajectory");
  if (j.contains("outputs")) {
    if (!j["outputs"].is_string()) throw ConfigError("expected a path", "outputs");
    cfg.outputs = j["outputs"].get<std::string>();
  }
  cfg.workers = get_u64(j, "workers", 1, "workers");
  if (cfg.workers < 1) throw ConfigError("must be >= 1", "workers");

  if (j.contains("sweep") && !j["sweep"].is_null()) {
    const json& s = j["sweep"];
    require_object(s, "sweep");
    reject_unknown(s, {"axis", "values", "shared_seed"}, "sweep");
    SweepSpec sw;
    const std::string axis = s.value("axis", std::string());
    if (axis == "n_steps")
      sw.axis = SweepAxis::n_steps;
    else if (axis == "delta")
      sw.axis = SweepAxis::delta;
    else if (axis == "observed_size")
      sw.axis = SweepAxis::observed_size;
    else
      throw ConfigError("expected n_steps, delta or observed_size", "sweep.axis");
    if (!s.contains("values") || !s["values"].is_array())
      throw ConfigError("expected an array", "sweep.values");
    for (std::size_t i = 0; i < s["values"].size(); ++i) {
      const auto& v = s["values"][i];
      const std::string field = "sweep.values[" + std::to_string(i) + "]";
      if (!v.is_number()) throw ConfigError("expected a number", field);
      const double x = v.get<double>();
      const bool integral = std::floor(x) == x;
      if (sw.axis == SweepAxis::n_steps && !(integral && x >= 1)) throw ConfigError("expected an integer >= 1", field);
      if (sw.axis == SweepAxis::delta && !(x > 0.0)) throw ConfigError("expected delta > 0", field);
      if (sw.axis == SweepAxis::observed_size && !(integral && x >= 1 && x <= static_cast<double>(n)))
        throw ConfigError("expected an integer in [1, N]", field);
      sw.values.push_back(x);
    }
    sw.shared_seed = bool_or(s, "shared_seed", false, "sweep.shared_seed");
    cfg.sweep = std::move(sw);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what(), path);
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["graph"] = {{"n_nodes", cfg.graph.n_nodes}, {"p", cfg.graph.p}, {"seed", cfg.graph.seed}};
  j["weights"] = {{"rho", cfg.rho}};
  json t;
  if (!cfg.triple_preset.empty()) t["preset"] = cfg.triple_preset;
  t["id"] = cfg.triple->id();
  for (const auto& [key, family] : {std::pair{"sigma", &cfg.triple->sigma()}, std::pair{"g", &cfg.triple->g()},
                                    std::pair{"h", &cfg.triple->h()}}) {
    json arr = json::array();
    for (const auto& f : *family) arr.push_back(to_json(f));
    t[key] = arr;
  }
  j["triple"] = t;
  j["noise"] = {{"std", cfg.noise_std}};
  j["sim"] = {{"n_steps", cfg.sim.n_steps}, {"seed", cfg.sim.seed}, {"y0", cfg.sim.y0}};
  j["weighting"] = {{"mode", to_string(cfg.weighting.mode)},
                    {"delta", cfg.weighting.delta},
                    {"singular_tol", cfg.weighting.singular_tol}};
  json est = json::array();
  for (auto k : cfg.estimators) est.push_back(to_string(k));
  j["estimators"] = est;
  if (cfg.observed_set) {
    json s = json::array();
    for (auto i : *cfg.observed_set) s.push_back(i + 1);
    j["observed_set"] = s;
  } else {
    j["observed_set"] = nullptr;
  }
  j["cond_limit"] = cfg.cond_limit;
  j["kappa_norm"] = to_string(cfg.kappa_norm);
  j["save_trajectory"] = cfg.save_trajectory;
  j["outputs"] = cfg.outputs;
  j["workers"] = cfg.workers;
  if (cfg.sweep)
    j["sweep"] = {{"axis", to_string(cfg.sweep->axis)},
                  {"values", cfg.sweep->values},
                  {"shared_seed", cfg.sweep->shared_seed}};
  else
    j["sweep"] = nullptr;
  return j;
}

}  // namespace ggnet
