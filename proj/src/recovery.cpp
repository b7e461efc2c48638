#include "ggnet/recovery.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "ggnet/error.h"
#include "ggnet/estimators.h"

namespace ggnet {
namespace {

double two_pass_sse(std::span<const double> v) {
  if (v.empty()) return 0.0;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double sse = 0.0;
  for (double x : v) sse += (x - mean) * (x - mean);
  return sse;
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

ClusterSplit kmeans2_1d(std::span<const double> values) {
  if (values.size() < 2) throw DegenerateClusterError("kmeans2_1d: need at least two values");
  std::vector<double> x(values.begin(), values.end());
  for (double v : x)
    if (!std::isfinite(v)) throw std::invalid_argument("kmeans2_1d: non-finite value");
  std::sort(x.begin(), x.end());
  if (x.front() == x.back()) throw DegenerateClusterError("kmeans2_1d: all values are equal");

  const std::size_t m = x.size();
  // Centering before the prefix sums keeps the one-pass SSE formula
  // accurate when the values sit far from zero.
  const double centre = mean_of(x);
  std::vector<double> s1(m + 1, 0.0), s2(m + 1, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    const double c = x[k] - centre;
    s1[k + 1] = s1[k] + c;
    s2[k + 1] = s2[k] + c * c;
  }
  auto fast_sse = [&](std::size_t split) {
    const double nl = static_cast<double>(split);
    const double nh = static_cast<double>(m - split);
    const double hs1 = s1[m] - s1[split];
    const double hs2 = s2[m] - s2[split];
    return std::max(0.0, s2[split] - s1[split] * s1[split] / nl) + std::max(0.0, hs2 - hs1 * hs1 / nh);
  };

  std::vector<std::pair<std::size_t, double>> candidates;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t split = 1; split < m; ++split) {
    if (!(x[split - 1] < x[split])) continue;
    const double sse = fast_sse(split);
    candidates.emplace_back(split, sse);
    best = std::min(best, sse);
  }

  // Re-score near-ties with the two-pass formula; first minimizer wins.
  const double band = 1e-9 * std::max(best, s2[m] * 1e-6) + 1e-300;
  std::size_t best_split = 0;
  double best_exact = std::numeric_limits<double>::infinity();
  const std::span<const double> all(x);
  for (const auto& [split, sse] : candidates) {
    if (sse > best + band) continue;
    const double exact = two_pass_sse(all.first(split)) + two_pass_sse(all.subspan(split));
    if (exact < best_exact) {
      best_exact = exact;
      best_split = split;
    }
  }

  ClusterSplit out;
  out.low_count = best_split;
  out.high_count = m - best_split;
  out.low_centroid = mean_of(all.first(best_split));
  out.high_centroid = mean_of(all.subspan(best_split));
  out.threshold = 0.5 * (x[best_split - 1] + x[best_split]);
  out.within_sse = best_exact;
  const double total = two_pass_sse(all);
  out.explained = total > 0.0 ? std::clamp(1.0 - best_exact / total, 0.0, 1.0) : 0.0;
  return out;
}

namespace {
std::vector<double> offdiagonal_values(const Eigen::MatrixXd& a) {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(a.size()));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (i != j) v.push_back(a(i, j));
  return v;
}
}  // namespace

ClusterSplit offdiagonal_split(const Eigen::MatrixXd& a_hat) {
  if (a_hat.rows() != a_hat.cols() || a_hat.rows() < 2)
    throw std::invalid_argument("classify_edges: estimate must be square and at least 2x2");
  return kmeans2_1d(offdiagonal_values(a_hat));
}

DirectedGraph classify_edges(const Eigen::MatrixXd& a_hat, const std::optional<NodeIndexMap>& map) {
  const ClusterSplit split = offdiagonal_split(a_hat);
  const auto n = static_cast<std::size_t>(a_hat.rows());
  if (map && (map->nodes.size() != n || map->n_total == 0))
    throw std::invalid_argument("classify_edges: index map does not match the estimate");
  DirectedGraph graph(map ? map->n_total : n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && a_hat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > split.threshold) {
        if (map)
          graph.add_edge(map->nodes[i], map->nodes[j]);
        else
          graph.add_edge(i, j);
      }
  return graph;
}

RecoveryMetrics score(const DirectedGraph& recovered, const DirectedGraph& truth,
                      const Eigen::MatrixXd& a_hat, const Eigen::MatrixXd& a) {
  const std::size_t n = truth.n_nodes();
  if (recovered.n_nodes() != n || static_cast<std::size_t>(a.rows()) != n ||
      static_cast<std::size_t>(a.cols()) != n || a_hat.rows() != a.rows() || a_hat.cols() != a.cols())
    throw std::invalid_argument("score: size mismatch");

  RecoveryMetrics m;
  double diff2 = 0.0, ref2 = 0.0;
  double min_edge = std::numeric_limits<double>::infinity();
  double max_non_edge = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      ++m.total_offdiag;
      const bool t = truth.has_edge(i, j);
      const bool r = recovered.has_edge(i, j);
      if (r && !t) ++m.false_edges;
      if (t && !r) ++m.missed_edges;
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      const double d = a_hat(ii, jj) - a(ii, jj);
      diff2 += d * d;
      ref2 += a(ii, jj) * a(ii, jj);
      if (t)
        min_edge = std::min(min_edge, a_hat(ii, jj));
      else
        max_non_edge = std::max(max_non_edge, a_hat(ii, jj));
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  m.edge_error_rate = m.total_offdiag ? static_cast<double>(m.false_edges + m.missed_edges) /
                                            static_cast<double>(m.total_offdiag)
                                      : 0.0;
  m.matrix_rel_error = ref2 > 0.0 ? std::sqrt(diff2 / ref2) : nan;
  m.identifiability_gap = (std::isfinite(min_edge) && std::isfinite(max_non_edge)) ? min_edge - max_non_edge : nan;
  return m;
}

std::vector<ProfileEntry> sorted_entry_profile(const Eigen::MatrixXd& a, const Eigen::MatrixXd& a_hat) {
  if (a.rows() != a_hat.rows() || a.cols() != a_hat.cols() || a.rows() != a.cols())
    throw std::invalid_argument("sorted_entry_profile: shape mismatch");
  const auto n = static_cast<std::size_t>(a.rows());
  std::vector<ProfileEntry> out;
  out.reserve(n * (n > 0 ? n - 1 : 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) {
        const auto ii = static_cast<Eigen::Index>(i);
        const auto jj = static_cast<Eigen::Index>(j);
        out.push_back({i * n + j, i, j, a(ii, jj), a_hat(ii, jj)});
      }
  std::stable_sort(out.begin(), out.end(),
                   [](const ProfileEntry& l, const ProfileEntry& r) { return l.true_value < r.true_value; });
  return out;
}

ProfileStats profile_stats(const std::vector<ProfileEntry>& profile) {
  ProfileStats s;
  if (profile.empty()) return s;
  std::map<double, std::pair<double, std::size_t>> groups;
  for (const auto& e : profile) {
    auto& g = groups[e.true_value];
    g.first += e.est_value;
    g.second += 1;
  }
  double offset = 0.0;
  for (const auto& e : profile) {
    const auto& g = groups[e.true_value];
    const double mean = g.first / static_cast<double>(g.second);
    offset += std::abs(mean - e.true_value);
    s.oscillation = std::max(s.oscillation, std::abs(e.est_value - mean));
  }
  s.mean_offset = offset / static_cast<double>(profile.size());
  return s;
}

std::string to_string(MatrixNorm norm) { return norm == MatrixNorm::infinity ? "infinity" : "two"; }

namespace {

struct FamilyEnvelope {
  double alpha = 0.0;
  double beta = 0.0;
  std::optional<double> exponent;
};

FamilyEnvelope family_envelope(const std::vector<Nonlinearity>& family, const std::string& label) {
  FamilyEnvelope out;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const auto& env = family[i].envelope();
    const std::string field = label + "[" + std::to_string(i) + "]";
    if (!env) throw ConfigError(family[i].name() + " has no declared envelope", field);
    out.alpha = std::max(out.alpha, env->alpha);
    out.beta = std::max(out.beta, env->beta);
    if (!env->exponent) {
      if (env->alpha > 0.0) throw ConfigError("envelope with alpha > 0 needs an exponent", field);
      continue;
    }
    if (out.exponent && std::abs(*out.exponent - *env->exponent) > 1e-12)
      throw ConfigError("nodes declare different exponents within one family", field);
    out.exponent = env->exponent;
  }
  return out;
}

struct Exponents {
  double p = 0.0;
  double q = 1.0;
  bool inferred = false;
};

Exponents resolve_exponents(const FamilyEnvelope& g, const FamilyEnvelope& h) {
  Exponents e;
  if (g.exponent && h.exponent) {
    e.p = *g.exponent;
    e.q = *h.exponent;
  } else if (g.exponent) {
    e.p = *g.exponent;
    e.q = 1.0 - e.p;
    e.inferred = true;
  } else if (h.exponent) {
    e.q = *h.exponent;
    e.p = 1.0 - e.q;
    e.inferred = true;
  } else {
    // g and h both bounded: any split with p + q = 1 is valid.
    e.p = 0.0;
    e.q = 1.0;
    e.inferred = true;
  }
  return e;
}

bool sums_to_one(double p, double q) { return std::abs(p + q - 1.0) <= 1e-12; }

}  // namespace

AssumptionReport stability_constant(const NonlinearityTriple& triple, const CombinationMatrix& a,
                                    MatrixNorm norm) {
  if (triple.n_nodes() != a.n_nodes()) throw std::invalid_argument("stability_constant: dimension mismatch");
  const FamilyEnvelope s = family_envelope(triple.sigma(), "sigma");
  const FamilyEnvelope g = family_envelope(triple.g(), "g");
  const FamilyEnvelope h = family_envelope(triple.h(), "h");
  const Exponents e = resolve_exponents(g, h);

  AssumptionReport rep;
  rep.sigma_invertible = std::all_of(triple.sigma().begin(), triple.sigma().end(),
                                     [](const Nonlinearity& f) { return f.invertible(); });
  rep.p = e.p;
  rep.q = e.q;
  rep.pq_sum_ok = sums_to_one(e.p, e.q);
  if (e.inferred) rep.notes.push_back("exponent of a bounded family inferred from p + q = 1");

  const double a_norm = norm == MatrixNorm::infinity
                            ? a.entries.cwiseAbs().rowwise().sum().maxCoeff()
                            : Eigen::JacobiSVD<Eigen::MatrixXd>(a.entries).singularValues()(0);
  if (rep.pq_sum_ok && e.p > 0.0 && e.q > 0.0) {
    rep.kappa_branch = 1;
    rep.kappa_s = s.alpha * g.alpha * h.alpha * a_norm;
  } else if (rep.pq_sum_ok && e.p == 1.0 && e.q == 0.0) {
    rep.kappa_branch = 2;
    rep.kappa_s = s.alpha * g.alpha * h.beta * a_norm;
  } else if (rep.pq_sum_ok && e.p == 0.0 && e.q == 1.0) {
    rep.kappa_branch = 3;
    rep.kappa_s = s.alpha * h.alpha * g.beta * a_norm;
  } else {
    throw ConfigError("exponents p = " + std::to_string(e.p) + ", q = " + std::to_string(e.q) +
                      " match no stability branch (need p + q = 1)");
  }
  rep.stability_sufficient = *rep.kappa_s < 1.0;
  if (!*rep.stability_sufficient)
    rep.notes.push_back("sufficient condition not met (kappa_s >= 1); this is not a divergence verdict");
  return rep;
}

std::vector<double> omega_moment_profile(const Trajectory& traj, const NonlinearityTriple& triple,
                                         const WeightingConfig& cfg) {
  const WeightingFunction omega(triple, cfg);
  std::vector<double> out;
  out.reserve(traj.n_steps());
  Eigen::VectorXd w(static_cast<Eigen::Index>(traj.n_nodes()));
  double sum = 0.0;
  // y_0 is the deterministic initial condition and is skipped.
  for (std::size_t k = 1; k <= traj.n_steps(); ++k) {
    const bool in_z = omega.evaluate(traj.state(k), w);
    sum += in_z ? std::numeric_limits<double>::infinity() : w.squaredNorm();
    out.push_back(sum / static_cast<double>(k));
  }
  return out;
}

OmegaMomentCheck check_omega_moment(const std::vector<double>& profile, double factor) {
  if (profile.size() < 4) throw std::invalid_argument("check_omega_moment: profile too short");
  const auto split = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(profile.size())))));
  OmegaMomentCheck c;
  c.early_peak = *std::max_element(profile.begin(), profile.begin() + static_cast<std::ptrdiff_t>(split));
  c.late_peak = *std::max_element(profile.begin() + static_cast<std::ptrdiff_t>(split), profile.end());
  c.bounded = std::isfinite(c.late_peak) && c.late_peak <= factor * c.early_peak;
  return c;
}

AssumptionReport assumption_report(const Trajectory& traj, const NonlinearityTriple& triple,
                                   const WeightingConfig& cfg, const Eigen::MatrixXd& f0_hat) {
  if (triple.n_nodes() != traj.n_nodes() || static_cast<std::size_t>(f0_hat.rows()) != traj.n_nodes())
    throw std::invalid_argument("assumption_report: dimension mismatch");
  AssumptionReport rep;
  rep.sigma_invertible = std::all_of(triple.sigma().begin(), triple.sigma().end(),
                                     [](const Nonlinearity& f) { return f.invertible(); });
  try {
    const Exponents e = resolve_exponents(family_envelope(triple.g(), "g"), family_envelope(triple.h(), "h"));
    rep.p = e.p;
    rep.q = e.q;
    rep.pq_sum_ok = sums_to_one(e.p, e.q);
  } catch (const ConfigError& err) {
    rep.pq_sum_ok = false;
    rep.notes.push_back(std::string("exponents unavailable: ") + err.what());
  }
  rep.f0_condition = condition_number(f0_hat);
  if (traj.n_steps() >= 4) {
    const OmegaMomentCheck c = check_omega_moment(omega_moment_profile(traj, triple, cfg));
    rep.omega_moment_flag = c.bounded;
    rep.omega_moment_ratio = c.late_peak / c.early_peak;
    if (!c.bounded) rep.notes.push_back("empirical E||omega(y)||^2 keeps growing: integrability is doubtful");
  }
  if (*rep.f0_condition > 1e8)
    rep.notes.push_back("F0hat is badly conditioned: h may be degenerate along the path");
  return rep;
}

}  // namespace ggnet
