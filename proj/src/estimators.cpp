#include "ggnet/estimators.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ggnet/error.h"

namespace ggnet {

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::egg: return "egg";
    case EstimatorKind::granger: return "granger";
    case EstimatorKind::correlation: return "correlation";
    case EstimatorKind::precision: return "precision";
    case EstimatorKind::egg_partial: return "egg_partial";
    case EstimatorKind::granger_partial: return "granger_partial";
    case EstimatorKind::least_squares: return "least_squares";
  }
  return "unknown";
}

EstimatorKind parse_estimator_kind(const std::string& name) {
  for (auto k : {EstimatorKind::egg, EstimatorKind::granger, EstimatorKind::correlation,
                 EstimatorKind::precision, EstimatorKind::egg_partial,
                 EstimatorKind::granger_partial, EstimatorKind::least_squares})
    if (to_string(k) == name) return k;
  throw ConfigError("unknown estimator '" + name + "'");
}

double condition_number(const Eigen::MatrixXd& m) {
  if (m.size() == 0) throw std::invalid_argument("condition_number: empty matrix");
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
  const double smax = sv.maxCoeff();
  const double smin = sv.minCoeff();
  if (smax == 0.0 || smin == 0.0) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

namespace {

void check_conditioning(double cond, double cond_limit, const std::string& what) {
  if (std::isinf(cond)) throw SingularMatrixError(cond, true, what);
  if (!(cond <= cond_limit)) throw SingularMatrixError(cond, false, what);
}

void check_cond_limit(double cond_limit) {
  if (!(cond_limit > 1.0)) throw std::invalid_argument("cond_limit must be > 1");
}

// X with X M = rhs for symmetric positive semidefinite M, via a
// pivoted LDL^T factorization of M (M symmetric, so X^T = M^{-1} rhs^T).
Eigen::MatrixXd right_solve_symmetric(const Eigen::MatrixXd& m, const Eigen::MatrixXd& rhs) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  if (ldlt.info() != Eigen::Success) throw NumericalError("LDLT factorization failed");
  return ldlt.solve(rhs.transpose()).transpose();
}

}  // namespace

EstimateReport egg_estimate(const Eigen::MatrixXd& f0_hat, const Eigen::MatrixXd& f1_hat,
                            double cond_limit) {
  check_cond_limit(cond_limit);
  if (f0_hat.rows() != f0_hat.cols() || f0_hat.rows() == 0 || f1_hat.rows() != f0_hat.rows() ||
      f1_hat.cols() != f0_hat.cols())
    throw std::invalid_argument("egg_estimate: F0hat and F1hat must be square of equal size");
  const double scale = std::max(1.0, f0_hat.cwiseAbs().maxCoeff());
  if ((f0_hat - f0_hat.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("egg_estimate: F0hat is not symmetric");

  EstimateReport rep;
  rep.kind = EstimatorKind::egg;
  rep.cond_f0 = condition_number(f0_hat);
  check_conditioning(*rep.cond_f0, cond_limit, "zero-lag matrix F0hat");
  rep.a_hat = right_solve_symmetric(f0_hat, f1_hat);
  return rep;
}

EstimateReport egg_estimate(const Trajectory& traj, const NonlinearityTriple& triple,
                            const WeightingConfig& cfg, double cond_limit) {
  const LagMatrices lag = accumulate_trajectory(traj, triple, cfg);
  const LagEstimates est = finalize(lag);
  EstimateReport rep = egg_estimate(est.f0_hat, est.f1_hat, cond_limit);
  rep.n_samples = lag.count();
  return rep;
}

Correlations sample_correlations(const Trajectory& traj) {
  const std::size_t n = traj.n_steps();
  if (n < 1) throw std::invalid_argument("sample_correlations: need at least one transition");
  const auto cols = static_cast<Eigen::Index>(n);
  const auto past = traj.states.leftCols(cols);
  const auto next = traj.states.middleCols(1, cols);
  const double inv = 1.0 / static_cast<double>(n);
  Correlations c;
  c.r0 = (past * past.transpose()) * inv;
  c.r1 = (next * past.transpose()) * inv;
  // Symmetrize exactly; the product kernel does not guarantee it.
  c.r0 = 0.5 * (c.r0 + c.r0.transpose()).eval();
  return c;
}

EstimateReport granger_estimate(const Trajectory& traj, double cond_limit) {
  check_cond_limit(cond_limit);
  const Correlations c = sample_correlations(traj);
  EstimateReport rep;
  rep.kind = EstimatorKind::granger;
  rep.n_samples = traj.n_steps();
  rep.cond_f0 = condition_number(c.r0);
  check_conditioning(*rep.cond_f0, cond_limit, "lag-zero correlation R0");
  rep.a_hat = right_solve_symmetric(c.r0, c.r1);
  return rep;
}

EstimateReport correlation_estimate(const Trajectory& traj) {
  EstimateReport rep;
  rep.kind = EstimatorKind::correlation;
  rep.n_samples = traj.n_steps();
  rep.a_hat = sample_correlations(traj).r0;
  return rep;
}

EstimateReport precision_estimate(const Trajectory& traj, double cond_limit) {
  check_cond_limit(cond_limit);
  const Eigen::MatrixXd r0 = sample_correlations(traj).r0;
  EstimateReport rep;
  rep.kind = EstimatorKind::precision;
  rep.n_samples = traj.n_steps();
  rep.cond_f0 = condition_number(r0);
  check_conditioning(*rep.cond_f0, cond_limit, "lag-zero correlation R0");
  rep.a_hat = right_solve_symmetric(r0, Eigen::MatrixXd::Identity(r0.rows(), r0.cols()));
  return rep;
}

EstimateReport least_squares_estimate(const Trajectory& traj, const NonlinearityTriple& triple,
                                      const WeightingConfig& cfg, double cond_limit) {
  check_cond_limit(cond_limit);
  const std::size_t n = traj.n_steps();
  const std::size_t dim = traj.n_nodes();
  if (n < 1) throw std::invalid_argument("least_squares_estimate: need at least one transition");
  if (triple.n_nodes() != dim) throw std::invalid_argument("least_squares_estimate: dimension mismatch");

  const WeightingFunction omega(triple, cfg);
  const auto& sigma = triple.sigma();
  const auto& h = triple.h();
  const auto rows = static_cast<Eigen::Index>(n);
  const auto cols = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXd design(rows, cols);  // row k: h(y_k)^T
  Eigen::MatrixXd target(rows, cols);  // row k: response for y_{k+1}
  Eigen::VectorXd w(cols);
  for (Eigen::Index k = 0; k < rows; ++k) {
    const auto yk = traj.states.col(k);
    const auto yk1 = traj.states.col(k + 1);
    for (Eigen::Index i = 0; i < cols; ++i) design(k, i) = h[static_cast<std::size_t>(i)](yk(i));
    const bool in_z = omega.evaluate(yk, w);
    for (Eigen::Index i = 0; i < cols; ++i) {
      if (in_z) {
        target(k, i) = 0.0;
        continue;
      }
      try {
        target(k, i) = w(i) * sigma[static_cast<std::size_t>(i)].inverse(yk1(i), static_cast<std::size_t>(i));
      } catch (const DomainError& e) {
        throw e.at_epoch(static_cast<std::size_t>(k + 1));
      }
    }
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(cols, cols).triangularView<Eigen::Upper>();
  const double cond_design = condition_number(r);
  EstimateReport rep;
  rep.kind = EstimatorKind::least_squares;
  rep.n_samples = n;
  rep.cond_f0 = cond_design * cond_design;
  if (qr.rank() < cols) throw SingularMatrixError(std::numeric_limits<double>::infinity(), true, "least-squares design");
  check_conditioning(*rep.cond_f0, cond_limit, "least-squares normal matrix");
  rep.a_hat = qr.solve(target).transpose();
  return rep;
}

PartialObservation observe(const Trajectory& traj, std::vector<std::size_t> nodes) {
  if (nodes.empty()) throw std::invalid_argument("observe: observed set must be nonempty");
  std::sort(nodes.begin(), nodes.end());
  if (std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end())
    throw std::invalid_argument("observe: observed set has duplicates");
  if (nodes.back() >= traj.n_nodes()) throw std::invalid_argument("observe: node index out of range");
  PartialObservation obs;
  obs.traj_ = project(traj, nodes);
  obs.nodes_ = std::move(nodes);
  return obs;
}

EstimateReport partial_estimate(const PartialObservation& obs, EstimatorKind kind,
                                const NonlinearityTriple& triple, const WeightingConfig& cfg,
                                double cond_limit) {
  EstimateReport rep;
  switch (kind) {
    case EstimatorKind::egg:
    case EstimatorKind::egg_partial:
      rep = egg_estimate(obs.trajectory(), triple.subset(obs.nodes()), cfg, cond_limit);
      rep.kind = EstimatorKind::egg_partial;
      break;
    case EstimatorKind::granger:
    case EstimatorKind::granger_partial:
      rep = granger_estimate(obs.trajectory(), cond_limit);
      rep.kind = EstimatorKind::granger_partial;
      break;
    default:
      throw std::invalid_argument("partial_estimate: kind must be egg or granger");
  }
  rep.observed_set = obs.nodes();
  return rep;
}

}  // namespace ggnet
