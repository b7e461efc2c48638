#include <doctest.h>

#include <cmath>

#include "ggnet/config.h"
#include "ggnet/dynamics.h"
#include "ggnet/error.h"
#include "ggnet/estimators.h"
#include "ggnet/lagfun.h"
#include "ggnet/netgen.h"

using namespace ggnet;

namespace {

NonlinearityTriple linear_triple(std::size_t n) {
  return NonlinearityTriple::uniform(n, Nonlinearity::identity(), Nonlinearity::constant_one(),
                                     Nonlinearity::identity());
}

Trajectory example_trajectory(const std::string& preset, std::size_t n, std::size_t steps, std::uint64_t seed,
                              CombinationMatrix* a_out = nullptr) {
  const auto a = build_combination_matrix(generate_binomial_graph(n, 0.3, 1), 0.5);
  if (a_out) *a_out = a;
  return simulate(a, make_preset_triple(preset, n), NoiseModel::uniform(n), Eigen::VectorXd::Zero(n), steps, seed);
}

}  // namespace

TEST_CASE("weighting config validation") {
  CHECK_NOTHROW(WeightingConfig{}.validate());
  CHECK_THROWS_AS((WeightingConfig{WeightingMode::exact, 0.1, 0.0}.validate()), ConfigError);
  CHECK_THROWS_AS((WeightingConfig{WeightingMode::regularized, 0.0, 0.0}.validate()), ConfigError);
  CHECK_THROWS_AS((WeightingConfig{WeightingMode::exact, 0.0, -1.0}.validate()), ConfigError);
  CHECK(parse_weighting_mode("regularized") == WeightingMode::regularized);
  CHECK(to_string(WeightingMode::exact) == "exact");
  CHECK_THROWS_AS(parse_weighting_mode("soft"), ConfigError);
}

TEST_CASE("omega evaluation") {
  const auto lin = linear_triple(3);
  const auto o = omega_eval(lin, {}, Eigen::Vector3d(0.3, -2.0, 0.0));
  CHECK(o.weights == Eigen::Vector3d::Ones());
  CHECK_FALSE(o.in_z);

  const auto ex1 = make_preset_triple("example1", 2);
  const auto z = omega_eval(ex1, {}, Eigen::Vector2d(0.0, 1.0));
  CHECK(z.in_z);
  const auto nz = omega_eval(ex1, {}, Eigen::Vector2d(2.0, 1.0));
  CHECK_FALSE(nz.in_z);
  CHECK(nz.weights(0) == doctest::Approx(1.0 / std::pow(2.0, 0.3)));

  // singular_tol widens the singular set.
  CHECK(omega_eval(ex1, {WeightingMode::exact, 0.0, 0.1}, Eigen::Vector2d(1e-6, 1.0)).in_z);

  const auto fig2 = make_preset_triple("fig2-singular-g", 1);
  const WeightingConfig reg{WeightingMode::regularized, 0.1, 0.0};
  CHECK(omega_eval(fig2, reg, Eigen::VectorXd::Constant(1, 0.05)).weights(0) == doctest::Approx(10.0));
  CHECK(omega_eval(fig2, reg, Eigen::VectorXd::Constant(1, -0.05)).weights(0) == doctest::Approx(-10.0));
  CHECK(omega_eval(fig2, reg, Eigen::VectorXd::Constant(1, 0.0)).weights(0) == doctest::Approx(10.0));
  CHECK(omega_eval(fig2, reg, Eigen::VectorXd::Constant(1, 0.5)).weights(0) == doctest::Approx(2.0));
  CHECK_FALSE(omega_eval(fig2, reg, Eigen::VectorXd::Constant(1, 0.0)).in_z);
  CHECK(omega_eval(fig2, {}, Eigen::VectorXd::Constant(1, 0.0)).in_z);
}

TEST_CASE("accumulation follows the outer-product definitions") {
  const auto lin = linear_triple(3);
  LagMatrices lag(3);
  const Eigen::Vector3d e1(1, 0, 0), e2(0, 1, 0);
  lag.accumulate(lin, WeightingConfig{}, e1, e2);
  CHECK(lag.count() == 1);
  CHECK(lag.f0_sum() == e1 * e1.transpose());
  CHECK(lag.f1_sum() == e2 * e1.transpose());
  const auto est = finalize(lag);
  CHECK(est.f0_hat == e1 * e1.transpose());
  CHECK(est.f1_hat == e2 * e1.transpose());

  lag.accumulate(lin, WeightingConfig{}, e1, e2);
  CHECK(lag.f0_sum() == 2 * e1 * e1.transpose());
  CHECK(lag.f1_sum() == 2 * e2 * e1.transpose());
  CHECK(finalize(lag).f0_hat == est.f0_hat);
  CHECK(finalize(lag).f1_hat == est.f1_hat);

  CHECK_THROWS_AS(finalize(LagMatrices(2)), InvalidStateError);
}

TEST_CASE("singular sample contributes zero to F1 only") {
  const auto ex1 = make_preset_triple("example1", 2);
  LagMatrices lag(2);
  lag.accumulate(ex1, WeightingConfig{}, Eigen::Vector2d(0.0, 4.0), Eigen::Vector2d(1.0, 2.0));
  CHECK(lag.f1_sum().isZero(0));
  Eigen::Vector2d hv(0.0, std::pow(4.0, 0.7));
  CHECK(lag.f0_sum().isApprox(hv * hv.transpose()));
}

TEST_CASE("accumulation surfaces inverse domain errors with the epoch") {
  const auto th = NonlinearityTriple::uniform(2, Nonlinearity::tanh(), Nonlinearity::constant_one(),
                                              Nonlinearity::identity());
  Trajectory traj;
  traj.states = Eigen::MatrixXd::Zero(2, 6);
  traj.states(1, 4) = 1.0;
  try {
    accumulate_trajectory(traj, th, {});
    FAIL("no throw");
  } catch (const DomainError& e) {
    CHECK(e.epoch() == 4u);
    CHECK(e.node() == 1u);
  }
}

TEST_CASE("linear functionals equal raw correlations") {
  const auto traj = example_trajectory("linear", 8, 5000, 3);
  const auto est = finalize(accumulate_trajectory(traj, linear_triple(8), {}));
  const auto r = sample_correlations(traj);
  CHECK((est.f0_hat - r.r0).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((est.f1_hat - r.r1).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("F0hat is symmetric positive semidefinite") {
  for (const char* preset : {"example1", "example2", "fig2-singular-g"}) {
    const auto traj = example_trajectory(preset, 10, 3000, 5);
    const auto est = finalize(accumulate_trajectory(traj, make_preset_triple(preset, 10), {}));
    CHECK((est.f0_hat - est.f0_hat.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * 3000);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(est.f0_hat);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
  }
}

TEST_CASE("merge is associative and commutative") {
  const auto triple = make_preset_triple("example2", 5);
  const auto traj = example_trajectory("example2", 5, 900, 8);
  const WeightingFunction w(triple, {});
  LagMatrices parts[3] = {LagMatrices(5), LagMatrices(5), LagMatrices(5)};
  for (std::size_t k = 0; k < 900; ++k) parts[k / 300].accumulate(triple, w, traj.state(k), traj.state(k + 1));
  LagMatrices ab = parts[0];
  ab.merge(parts[1]);
  ab.merge(parts[2]);
  LagMatrices cb = parts[2];
  cb.merge(parts[1]);
  cb.merge(parts[0]);
  const auto whole = accumulate_trajectory(traj, triple, {});
  CHECK(ab.count() == 900);
  CHECK((ab.f0_sum() - cb.f0_sum()).norm() <= 1e-12 * whole.f0_sum().norm());
  CHECK((ab.f1_sum() - whole.f1_sum()).norm() <= 1e-12 * whole.f1_sum().norm());
  CHECK_THROWS_AS(ab.merge(LagMatrices(4)), std::invalid_argument);
}

TEST_CASE("compensated sums stay accurate on long runs") {
  // Accumulate the same pair 10^6 times: the exact result is known.
  const auto lin = linear_triple(2);
  LagMatrices lag(2);
  const Eigen::Vector2d y(0.1, 0.7), y1(0.3, -0.2);
  for (int k = 0; k < 1000000; ++k) lag.accumulate(lin, WeightingConfig{}, y, y1);
  const Eigen::Matrix2d f0 = y * y.transpose() * 1e6;
  const Eigen::Matrix2d f1 = y1 * y.transpose() * 1e6;
  CHECK(((lag.f0_sum() - f0).cwiseAbs().array() <= 1e-10 * f0.cwiseAbs().array()).all());
  CHECK(((lag.f1_sum() - f1).cwiseAbs().array() <= 1e-10 * f1.cwiseAbs().array()).all());
}

TEST_CASE("blow-up detector") {
  std::vector<double> flat(5000, 1.0);
  CHECK_FALSE(detect_blowup(flat).fired);
  std::vector<double> spike = flat;
  spike[4000] = 50.0;
  const auto v = detect_blowup(spike);
  CHECK(v.fired);
  CHECK(v.peak == 50.0);
  CHECK(v.median == 1.0);
  // Transients inside the burn-in are ignored.
  std::vector<double> early = flat;
  early[10] = 1e6;
  CHECK_FALSE(detect_blowup(early).fired);
}

TEST_CASE("running F1 max matches a direct recomputation") {
  const auto triple = make_preset_triple("example1", 4);
  const auto traj = example_trajectory("example1", 4, 200, 2);
  const auto prof = running_f1_max(traj, triple, {});
  REQUIRE(prof.size() == 200);
  LagMatrices lag(4);
  const WeightingFunction w(triple, {});
  for (std::size_t k = 0; k < 200; ++k) {
    lag.accumulate(triple, w, traj.state(k), traj.state(k + 1));
    CHECK(prof[k] == doctest::Approx(finalize(lag).f1_hat.cwiseAbs().maxCoeff()).epsilon(1e-12));
  }
}
