#include <doctest.h>

#include <cmath>
#include <vector>

#include "ggnet/config.h"
#include "ggnet/dynamics.h"
#include "ggnet/estimators.h"
#include "ggnet/lagfun.h"
#include "ggnet/netgen.h"
#include "ggnet/recovery.h"
#include "ggnet/rng.h"

using namespace ggnet;

namespace {

double rel_fro(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) { return (x - y).norm() / y.norm(); }

Trajectory run(const CombinationMatrix& a, const std::string& preset, std::size_t steps, std::uint64_t seed) {
  const auto n = a.n_nodes();
  return simulate(a, make_preset_triple(preset, n), NoiseModel::uniform(n), Eigen::VectorXd::Zero(n), steps, seed);
}

CombinationMatrix reference_network(std::uint64_t seed) {
  return build_combination_matrix(generate_binomial_graph(50, 0.2, seed), 0.5);
}

}  // namespace

TEST_CASE("classical VAR(1) consistency of the Granger estimate") {
  const auto a = build_combination_matrix(generate_binomial_graph(5, 0.4, 3), 0.5);
  const auto traj = run(a, "linear", 1000000, 21);
  const double err = rel_fro(granger_estimate(traj).a_hat, a.entries);
  MESSAGE("granger relative error at n = 1e6: ", err);
  CHECK(err < 0.02);
}

TEST_CASE("zero-lag correlation of pure noise") {
  CombinationMatrix zero;
  zero.entries = Eigen::MatrixXd::Zero(4, 4);
  const auto traj = run(zero, "linear", 1000000, 8);
  const auto r0 = correlation_estimate(traj).a_hat;
  CHECK((r0 - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("ergodic convergence of F0hat on the example2 configuration") {
  int votes = 0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto a = reference_network(10 + s);
    const auto triple = make_preset_triple("example2", 50);
    const auto traj = run(a, "example2", 100000, derive_seed(99, s));
    const WeightingFunction w(triple, {});
    LagMatrices lag(50);
    Eigen::MatrixXd f3, f4;
    for (std::size_t k = 0; k < 100000; ++k) {
      lag.accumulate(triple, w, traj.state(k), traj.state(k + 1));
      if (lag.count() == 1000) f3 = finalize(lag).f0_hat;
      if (lag.count() == 10000) f4 = finalize(lag).f0_hat;
    }
    const Eigen::MatrixXd f5 = finalize(lag).f0_hat;
    const double late = (f5 - f4).norm(), early = (f4 - f3).norm();
    MESSAGE("seed ", s, ": |F0(1e5) - F0(1e4)| = ", late, ", |F0(1e4) - F0(1e3)| = ", early);
    if (late < early) ++votes;
  }
  CHECK(votes >= 3);
}

struct DeskErrors {
  double e3, e5, e_full;
};

// Relative errors on prefixes of one n = 2e5 path per seed (computed once).
const std::vector<DeskErrors>& desk_errors() {
  static const std::vector<DeskErrors> errors = [] {
    std::vector<DeskErrors> out;
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto a = reference_network(20 + s);
      const auto triple = make_preset_triple("example2", 50);
      const auto traj = run(a, "example2", 200000, derive_seed(7, s));
      Trajectory head;
      head.states = traj.states.leftCols(1001);
      const double e3 = rel_fro(egg_estimate(head, triple, {}).a_hat, a.entries);
      head.states = traj.states.leftCols(100001);
      const double e5 = rel_fro(egg_estimate(head, triple, {}).a_hat, a.entries);
      out.push_back({e3, e5, rel_fro(egg_estimate(traj, triple, {}).a_hat, a.entries)});
    }
    return out;
  }();
  return errors;
}

TEST_CASE("EGG error shrinks with n on example2") {
  int improved = 0;
  for (const auto& e : desk_errors()) {
    MESSAGE("error n=1e3 ", e.e3, ", n=1e5 ", e.e5, ", n=2e5 ", e.e_full);
    if (e.e5 < e.e3) ++improved;
  }
  CHECK(improved >= 4);
}

// Known red: the error is variance-limited (about 0.18 at n = 2e5, shrinking
// like n^{-1/2}); see README.
TEST_CASE("EGG error below 0.1 at n = 2e5 on example2") {
  for (const auto& e : desk_errors()) CHECK(e.e_full < 0.1);
}

TEST_CASE("EGG profile tracks the true entries on example1") {
  const auto a = reference_network(1);
  const auto triple = make_preset_triple("example1", 50);
  const auto traj = run(a, "example1", 200000, 2);
  const auto est = egg_estimate(traj, triple, {});
  double sup = 0;
  for (const auto& e : sorted_entry_profile(a.entries, est.a_hat))
    sup = std::max(sup, std::abs(e.est_value - e.true_value));
  MESSAGE("sup-norm profile deviation: ", sup);
  CHECK(sup < 0.05);
}
