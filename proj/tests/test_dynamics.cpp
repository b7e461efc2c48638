#include <doctest.h>

#include <cmath>
#include <limits>

#include <boost/math/special_functions/atanh.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "ggnet/dynamics.h"
#include "ggnet/error.h"
#include "ggnet/netgen.h"
#include "ggnet/nonlinearity.h"

using namespace ggnet;

namespace {

CombinationMatrix scalar_a(double a) {
  CombinationMatrix m;
  m.entries = Eigen::MatrixXd::Constant(1, 1, a);
  m.rho = a;
  return m;
}

NonlinearityTriple linear_triple(std::size_t n) {
  return NonlinearityTriple::uniform(n, Nonlinearity::identity(), Nonlinearity::constant_one(),
                                     Nonlinearity::identity());
}

}  // namespace

TEST_CASE("nonlinearity values") {
  CHECK(Nonlinearity::sign_power(0.5)(4.0) == 2.0);
  CHECK(Nonlinearity::sign_power(0.5)(-4.0) == -2.0);
  CHECK(Nonlinearity::sign_power(0.3)(0.0) == 0.0);
  CHECK(Nonlinearity::tanh()(0.0) == 0.0);
  CHECK(Nonlinearity::sin_plus_sign_power(4, 0.6)(0.0) == 0.0);
  CHECK(Nonlinearity::sin_plus_sign_power(4, 0.6)(1.0) == doctest::Approx(std::sin(4.0) + 1.0));
  CHECK(Nonlinearity::tanh_shifted(2.0)(0.0) == 2.0);
  CHECK(Nonlinearity::limiter(-1, 1)(3.0) == 1.0);
  CHECK(Nonlinearity::limiter(-1, 1)(-3.0) == -1.0);
  CHECK(Nonlinearity::limiter(-1, 1)(0.25) == 0.25);
  CHECK(Nonlinearity::constant_one()(-7.0) == 1.0);
  CHECK(Nonlinearity::identity()(-7.0) == -7.0);
}

TEST_CASE("nonlinearity parameter validation") {
  CHECK_THROWS_AS(Nonlinearity::sign_power(0.0), std::invalid_argument);
  CHECK_THROWS_AS(Nonlinearity::sign_power(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(Nonlinearity::limiter(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Nonlinearity::limiter(2.0, 1.0), std::invalid_argument);
}

TEST_CASE("inverse values") {
  CHECK(Nonlinearity::sign_power(0.5).inverse(2.0) == doctest::Approx(4.0).epsilon(1e-15));
  using boost::multiprecision::cpp_bin_float_50;
  const double ref = static_cast<double>(boost::multiprecision::atanh(cpp_bin_float_50(0.5)));
  CHECK(std::abs(Nonlinearity::tanh().inverse(0.5) - ref) < 1e-15);
  CHECK(std::abs(ref - 0.549306) < 1e-6);
  CHECK(Nonlinearity::tanh_shifted(2.0).inverse(2.5) == doctest::Approx(boost::math::atanh(0.5)));
  CHECK_THROWS_AS(Nonlinearity::tanh().inverse(1.0), DomainError);
  CHECK_THROWS_AS(Nonlinearity::tanh().inverse(-1.5), DomainError);
  CHECK_THROWS_AS(Nonlinearity::tanh_shifted(2.0).inverse(0.5), DomainError);
  try {
    Nonlinearity::tanh().inverse(1.0, 7);
    FAIL("no throw");
  } catch (const DomainError& e) {
    CHECK(e.node() == 7u);
    CHECK(e.value() == 1.0);
  }
  CHECK_FALSE(Nonlinearity::limiter(-1, 1).invertible());
  CHECK_FALSE(Nonlinearity::sin_plus_sign_power(4, 0.6).invertible());
  CHECK_THROWS_AS(Nonlinearity::limiter(-1, 1).inverse(0.0), ConfigError);
}

TEST_CASE("inverse round trips on [-10, 10]") {
  const std::vector<Nonlinearity> fs{Nonlinearity::identity(), Nonlinearity::sign_power(0.5),
                                     Nonlinearity::sign_power(0.3), Nonlinearity::sign_power(1.7),
                                     Nonlinearity::tanh(), Nonlinearity::tanh_shifted(-2.0),
                                     Nonlinearity::tanh_shifted(0.7)};
  for (const auto& f : fs) {
    REQUIRE(f.invertible());
    for (int k = 0; k <= 1000; ++k) {
      const double y = -10.0 + 0.02 * k;
      const double fy = f(y);
      const double back = f.inverse(fy);
      double tol = 1e-10 * std::max(1.0, std::abs(y));
      if (f.kind() == NonlinearityKind::tanh || f.kind() == NonlinearityKind::tanh_shifted) {
        // tanh rounds to a representable value near +-1, so the inverse can
        // only recover y up to the rounding of tanh scaled by 1/tanh'(y).
        const double t = std::tanh(y);
        tol += 2 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(fy)) / (1.0 - t * t);
      }
      CHECK_MESSAGE(std::abs(back - y) <= tol, f.name(), " at y = ", y);
    }
  }
  // Forward after inverse on the range.
  for (int k = 0; k <= 1000; ++k) {
    const double y = -0.999 + 1.998 * k / 1000.0;
    CHECK(std::abs(Nonlinearity::tanh()(Nonlinearity::tanh().inverse(y)) - y) < 1e-15);
  }
}

TEST_CASE("default envelopes bound the functions") {
  const std::vector<Nonlinearity> fs{Nonlinearity::identity(), Nonlinearity::constant_one(),
                                     Nonlinearity::sign_power(0.5), Nonlinearity::tanh(),
                                     Nonlinearity::tanh_shifted(-2.0), Nonlinearity::limiter(-1, 3),
                                     Nonlinearity::sin_plus_sign_power(4, 0.6)};
  for (const auto& f : fs) {
    REQUIRE(f.envelope().has_value());
    const auto& e = *f.envelope();
    for (int k = -2000; k <= 2000; ++k) {
      const double y = k * 0.05;
      const double bound = e.alpha * (e.exponent ? std::pow(std::abs(y), *e.exponent) : 0.0) + e.beta;
      CHECK(std::abs(f(y)) <= bound + 1e-12);
    }
  }
  CHECK_FALSE(Nonlinearity::sign_power(1.5).envelope().has_value());
  CHECK_THROWS_AS(Nonlinearity::tanh().with_envelope({-1.0, 1.0, std::nullopt}), ConfigError);
  CHECK_THROWS_AS(Nonlinearity::tanh().with_envelope({1.0, 1.0, 1.5}), ConfigError);
  CHECK(Nonlinearity::tanh().with_envelope({0.0, 2.0, std::nullopt}).envelope()->beta == 2.0);
}

TEST_CASE("zeros of builtins") {
  CHECK(Nonlinearity::identity().zeros() == std::vector<double>{0.0});
  CHECK(Nonlinearity::sign_power(0.3).zeros() == std::vector<double>{0.0});
  CHECK(Nonlinearity::constant_one().zeros().empty());
  CHECK(Nonlinearity::tanh_shifted(2.0).zeros().empty());
  const auto z = Nonlinearity::tanh_shifted(0.5).zeros();
  REQUIRE(z.size() == 1);
  CHECK(std::tanh(z[0]) == doctest::Approx(-0.5));
  for (double r : Nonlinearity::sin_plus_sign_power(4, 0.6).zeros())
    CHECK(std::abs(Nonlinearity::sin_plus_sign_power(4, 0.6)(r)) < 1e-9);
  CHECK_THROWS_AS(Nonlinearity::limiter(0.0, 1.0).zeros(), ConfigError);
}

TEST_CASE("triple validation") {
  CHECK_THROWS_AS(NonlinearityTriple::uniform(3, Nonlinearity::limiter(-1, 1), Nonlinearity::constant_one(),
                                              Nonlinearity::identity()),
                  ConfigError);
  // p + q = 0.5 + 0.7
  CHECK_THROWS_AS(NonlinearityTriple::uniform(3, Nonlinearity::identity(), Nonlinearity::sign_power(0.5),
                                              Nonlinearity::sign_power(0.7)),
                  ConfigError);
  CHECK_THROWS_AS(NonlinearityTriple({Nonlinearity::identity()}, {}, {}), ConfigError);
  const auto t = linear_triple(4);
  CHECK(t.is_linear());
  CHECK(t.subset({2, 0}).n_nodes() == 2);
  CHECK_FALSE(NonlinearityTriple::uniform(2, Nonlinearity::tanh(), Nonlinearity::constant_one(),
                                          Nonlinearity::identity())
                  .is_linear());
}

TEST_CASE("zero coupling gives the pure noise sequence") {
  CombinationMatrix a;
  a.entries = Eigen::MatrixXd::Zero(3, 3);
  const NoiseModel noise = NoiseModel::uniform(3, 1.5);
  const auto traj = simulate(a, linear_triple(3), noise, Eigen::VectorXd::Zero(3), 50, 11);
  for (std::size_t k = 0; k < 50; ++k) CHECK(traj.state(k + 1) == draw_noise(noise, 11, k + 1));
}

TEST_CASE("noiseless scalar decay") {
  const auto traj =
      simulate(scalar_a(0.5), linear_triple(1), NoiseModel::uniform(1, 0.0), Eigen::VectorXd::Ones(1), 3, 1);
  CHECK(traj.n_steps() == 3);
  CHECK(traj.states(0, 0) == 1.0);
  CHECK(traj.states(0, 1) == 0.5);
  CHECK(traj.states(0, 2) == 0.25);
  CHECK(traj.states(0, 3) == 0.125);
}

TEST_CASE("linear simulator matches a separate VAR recursion") {
  const auto g = generate_binomial_graph(20, 0.2, 3);
  const auto a = build_combination_matrix(g, 0.5);
  const NoiseModel noise = NoiseModel::uniform(20);
  const auto traj = simulate(a, linear_triple(20), noise, Eigen::VectorXd::Zero(20), 2000, 99);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(20);
  double worst = 0;
  for (std::size_t k = 0; k < 2000; ++k) {
    y = a.entries * y + draw_noise(noise, 99, k + 1);
    worst = std::max(worst, (y - traj.state(k + 1)).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("simulation is seed deterministic") {
  const auto a = build_combination_matrix(generate_binomial_graph(10, 0.3, 1), 0.5);
  const auto t = NonlinearityTriple::uniform(10, Nonlinearity::sign_power(0.5), Nonlinearity::sign_power(0.3),
                                             Nonlinearity::sign_power(0.7));
  const auto n = NoiseModel::uniform(10);
  const auto t1 = simulate(a, t, n, Eigen::VectorXd::Zero(10), 500, 5);
  const auto t2 = simulate(a, t, n, Eigen::VectorXd::Zero(10), 500, 5);
  const auto t3 = simulate(a, t, n, Eigen::VectorXd::Zero(10), 500, 6);
  CHECK(t1.states == t2.states);
  CHECK(t1.states != t3.states);
  // A longer run extends the shorter one: noise does not depend on the horizon.
  const auto t4 = simulate(a, t, n, Eigen::VectorXd::Zero(10), 800, 5);
  CHECK(t4.states.leftCols(501) == t1.states);
}

TEST_CASE("bounded sigma keeps states in range") {
  const std::size_t n = 6;
  const auto a = build_combination_matrix(generate_binomial_graph(n, 0.5, 2), 0.5);
  std::vector<Nonlinearity> sigma(n, Nonlinearity::tanh());
  sigma[1] = Nonlinearity::tanh_shifted(-2.0);
  sigma[2] = Nonlinearity::tanh_shifted(0.5);
  const NonlinearityTriple t(sigma, std::vector<Nonlinearity>(n, Nonlinearity::sign_power(0.4)),
                             std::vector<Nonlinearity>(n, Nonlinearity::limiter(-1, 1)));
  const auto traj = simulate(a, t, NoiseModel::uniform(n, 3.0), Eigen::VectorXd::Zero(n), 5000, 4);
  const std::vector<double> c{0.0, -2.0, 0.5, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 1; k <= 5000; ++k) {
      CHECK(traj.states(i, k) >= c[i] - 1.0);
      CHECK(traj.states(i, k) <= c[i] + 1.0);
    }
}

TEST_CASE("stationary variance of a scalar AR(1)") {
  const auto traj =
      simulate(scalar_a(0.5), linear_triple(1), NoiseModel::uniform(1), Eigen::VectorXd::Zero(1), 1000000, 17);
  const Eigen::ArrayXd y = traj.states.row(0).array();
  const double mean = y.mean();
  const double var = (y - mean).square().mean();
  CHECK(std::abs(var - 4.0 / 3.0) / (4.0 / 3.0) < 0.03);
}

TEST_CASE("divergence is reported with epoch and node") {
  const auto traj_fn = [] {
    return simulate(scalar_a(2.0), linear_triple(1), NoiseModel::uniform(1, 0.0), Eigen::VectorXd::Ones(1), 100, 1);
  };
  try {
    traj_fn();
    FAIL("no throw");
  } catch (const DivergenceError& e) {
    CHECK(e.epoch() == 40);  // 2^40 > 1e12 >= 2^39
    CHECK(e.node() == 0);
  }
}

TEST_CASE("simulate preconditions") {
  CHECK_THROWS_AS(simulate(scalar_a(0.5), linear_triple(2), NoiseModel::uniform(1), Eigen::VectorXd::Zero(1), 5, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(simulate(scalar_a(0.5), linear_triple(1), NoiseModel::uniform(1), Eigen::VectorXd::Zero(1), 0, 1),
                  std::invalid_argument);
  CHECK_FALSE(NoiseModel::uniform(2, 0.0).has_positive_density());
  CHECK(NoiseModel::uniform(2, 1.0).has_positive_density());
}

TEST_CASE("additive representation and projection") {
  const auto a = build_combination_matrix(generate_binomial_graph(4, 0.5, 2), 0.5);
  const auto lin = simulate(a, linear_triple(4), NoiseModel::uniform(4), Eigen::VectorXd::Zero(4), 100, 3);
  CHECK(transform_to_additive(lin, linear_triple(4)).states == lin.states);

  const auto th = NonlinearityTriple::uniform(4, Nonlinearity::tanh(), Nonlinearity::constant_one(),
                                              Nonlinearity::identity());
  const auto traj = simulate(a, th, NoiseModel::uniform(4), Eigen::VectorXd::Zero(4), 100, 3);
  const auto z = transform_to_additive(traj, th);
  for (Eigen::Index k = 0; k < z.states.cols(); ++k)
    for (Eigen::Index i = 0; i < 4; ++i) CHECK(z.states(i, k) == std::atanh(traj.states(i, k)));

  Trajectory bad = traj;
  bad.states(2, 10) = 1.0;
  try {
    transform_to_additive(bad, th);
    FAIL("no throw");
  } catch (const DomainError& e) {
    CHECK(e.node() == 2u);
    CHECK(e.epoch() == 10u);
  }

  const auto p = project(traj, {3, 1});
  CHECK(p.n_nodes() == 2);
  CHECK(p.states.row(0) == traj.states.row(3));
  CHECK(p.states.row(1) == traj.states.row(1));
  CHECK_THROWS_AS(project(traj, {4}), std::invalid_argument);
}
