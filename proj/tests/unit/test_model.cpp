#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "ridgelab/harness.hpp"
#include "ridgelab/model.hpp"
#include "ridgelab/synth.hpp"

namespace {

using namespace ridgelab;

Dataset random_dataset(std::size_t n, std::size_t d, Rng& rng) {
  std::vector<double> xs(n * d);
  Vector ys(n);
  for (double& x : xs) x = rng.normal();
  for (double& y : ys) y = rng.normal();
  return Dataset(d, std::move(xs), std::move(ys));
}

double rel_diff(const Vector& a, const Vector& b) {
  Vector diff = a;
  simd::axpy(-1.0, b, diff);
  return norm(diff) / std::max(norm(a), 1e-300);
}

TEST(Dataset, Validation) {
  EXPECT_THROW(Dataset(2, {}, {}), std::invalid_argument);
  EXPECT_THROW(Dataset(0, {}, {1.0}), std::invalid_argument);
  EXPECT_THROW(Dataset(2, {1.0}, {1.0}), std::invalid_argument);
  EXPECT_THROW(Dataset(1, {NAN}, {1.0}), std::invalid_argument);
  EXPECT_THROW(Dataset(1, {1.0}, {INFINITY}), std::invalid_argument);
}

TEST(EmpiricalCovariance, TrivialCases) {
  const SymMatrix one = empirical_covariance(Dataset(2, {1, 0}, {0}));
  EXPECT_EQ(one(0, 0), 1.0);
  EXPECT_EQ(one(0, 1), 0.0);
  EXPECT_EQ(one(1, 1), 0.0);
  const SymMatrix two = empirical_covariance(Dataset(2, {1, 0, 0, 1}, {0, 0}));
  EXPECT_EQ(two(0, 0), 0.5);
  EXPECT_EQ(two(1, 1), 0.5);
  EXPECT_EQ(two(0, 1), 0.0);
}

TEST(EmpiricalCovariance, DirectSummation) {
  Rng rng(3);
  const Dataset data = random_dataset(50, 4, rng);
  const SymMatrix s = empirical_covariance(data);
  double tr = 0.0;
  for (std::size_t i = 0; i < 50; ++i) {
    for (double x : data.x(i)) tr += x * x;
  }
  EXPECT_NEAR(trace(s), tr / 50.0, 1e-12);
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = 0; b < 4; ++b) {
      double e = 0.0;
      for (std::size_t i = 0; i < 50; ++i) e += data.x(i)[a] * data.x(i)[b];
      EXPECT_NEAR(s(a, b), e / 50.0, 1e-12);
    }
  }
  EXPECT_TRUE(is_psd(s));
}

TEST(RidgeFit, SinglePointClosedForm) {
  const Dataset data(3, {1, 0, 0}, {1});
  for (double lambda : {0.1, 1.0, 7.0}) {
    for (const RidgeModel& m : {ridge_fit_primal(data, lambda), ridge_fit_dual(data, lambda)}) {
      EXPECT_NEAR(m.theta_hat[0], 1.0 / (1.0 + lambda), 1e-14);
      EXPECT_EQ(m.theta_hat[1], 0.0);
      EXPECT_EQ(m.theta_hat[2], 0.0);
    }
  }
}

TEST(RidgeFit, ZeroResponsesGiveZero) {
  Rng rng(4);
  std::vector<double> xs(20);
  for (double& x : xs) x = rng.normal();
  const Dataset data(4, xs, Vector(5, 0.0));
  for (double v : ridge_fit(data, 0.3).theta_hat) EXPECT_EQ(v, 0.0);
}

TEST(RidgeFit, PrimalMinimizesObjective) {
  Rng rng(5);
  const Dataset data = random_dataset(30, 5, rng);
  const RidgeModel m = ridge_fit_primal(data, 0.5);
  const double best = ridge_objective(data, 0.5, m.theta_hat);
  for (int rep = 0; rep < 100; ++rep) {
    Vector t = m.theta_hat;
    const double step = std::pow(10.0, -4.0 + 3.0 * rng.uniform());
    for (double& x : t) x += step * rng.normal();
    EXPECT_LE(best, ridge_objective(data, 0.5, t));
  }
}

TEST(RidgeFit, PrimalDualAgreement) {
  Rng rng(6);
  const Dataset wide = random_dataset(3, 10, rng);
  const Dataset tall = random_dataset(50, 4, rng);
  for (const Dataset* d : {&wide, &tall}) {
    EXPECT_LE(rel_diff(ridge_fit_primal(*d, 0.2).theta_hat, ridge_fit_dual(*d, 0.2).theta_hat),
              1e-8);
  }
}

TEST(RidgeFit, RejectsBadLambda) {
  const Dataset data(1, {1}, {1});
  EXPECT_THROW(ridge_fit_primal(data, 0.0), std::domain_error);
  EXPECT_THROW(ridge_fit_dual(data, -1.0), std::domain_error);
}

TEST(ExcessRisk, TrivialCases) {
  const Vector t{1.0, 2.0};
  EXPECT_EQ(excess_risk(t, SymMatrix::identity(2), t), 0.0);
  EXPECT_DOUBLE_EQ(excess_risk(Vector{2.0, 2.0}, SymMatrix::identity(2), t), 1.0);
  EXPECT_THROW(excess_risk(Vector{1.0}, SymMatrix::identity(2), t), std::invalid_argument);
}

TEST(ExcessRisk, MatchesEnumerationOverAtoms) {
  Rng rng(8);
  const auto basis = random_orthonormal_rows(4, rng);
  const DesignDistribution design = make_bounded_design(Vector{2.0, 1.0, 0.5, 0.1}, basis);
  const Vector theta = random_normal_vector(4, rng);
  const Vector star = random_normal_vector(4, rng);
  double want = 0.0;
  for (const Atom& a : design.atoms()) {
    const double e = simd::dot(theta, a.x) - simd::dot(star, a.x);
    want += a.probability * e * e;
  }
  EXPECT_NEAR(excess_risk(theta, design.covariance(), star), want, 1e-12 * (1 + want));
}

TEST(PopulationRisk, NoiseFloorAndMonteCarlo) {
  const std::vector<double> spectrum{1.0, 0.5, 0.25};
  Problem p{make_bounded_design(spectrum), Vector{0.3, -0.2, 0.1}, 0.7, {}, {}};
  EXPECT_DOUBLE_EQ(population_risk(p.theta_star, p), 0.49);
  Problem quiet = p;
  quiet.sigma = 0.0;
  EXPECT_EQ(population_risk(quiet.theta_star, quiet), 0.0);

  const Vector theta{1.0, 0.0, -1.0};
  const Dataset data = sample_dataset(p, 100000, 17);
  std::vector<double> loss(data.n());
  for (std::size_t i = 0; i < data.n(); ++i) {
    const double r = data.ys()[i] - simd::dot(theta, data.x(i));
    loss[i] = r * r;
  }
  const MeanStderr m = mc_mean_and_stderr(loss);
  EXPECT_LE(std::abs(m.mean - population_risk(theta, p)), 4.0 * m.stderr_);
}

}  // namespace
