#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "oracles.hpp"
#include "ridgelab/functionals.hpp"
#include "ridgelab/harness.hpp"
#include "ridgelab/model.hpp"

namespace {

using namespace ridgelab;

TEST(EffectiveDimension, TrivialCases) {
  EXPECT_NEAR(effective_dimension(SymMatrix::identity(7), 0.4), 7.0 / 1.4, 1e-14);
  EXPECT_EQ(effective_dimension(SymMatrix(3), 0.4), 0.0);
  EXPECT_THROW(effective_dimension(SymMatrix::identity(2), 0.0), std::domain_error);
}

TEST(EffectiveDimension, PolynomialDecayDirectSumAndEnvelope) {
  const std::size_t d = 200;
  const double lambda = 0.01;
  double direct = 0.0;
  double harmonic = 0.0;
  std::vector<double> mu(d);
  for (std::size_t i = 1; i <= d; ++i) {
    const double m = 1.0 / static_cast<double>(i * i);
    mu[i - 1] = m;
    direct += m / (m + lambda);
    harmonic += 1.0 / static_cast<double>(i);
  }
  const double got = effective_dimension(SymMatrix::diagonal(mu), lambda);
  EXPECT_NEAR(got, direct, 1e-11);
  EXPECT_LE(got, 2.0 * harmonic / std::sqrt(lambda));
}

TEST(BiasFunctional, TrivialCases) {
  const Vector t{1.0, -2.0, 2.0};
  EXPECT_NEAR(bias_functional(SymMatrix::identity(3), 0.5, t), 0.5 * 9.0 / 1.5, 1e-14);
  EXPECT_EQ(bias_functional(SymMatrix::identity(3), 0.5, Vector(3, 0.0)), 0.0);
  EXPECT_THROW(bias_functional(SymMatrix::identity(2), 0.5, t), std::invalid_argument);
}

TEST(BiasFunctional, EqualsMinimumOfRegularizedObjective) {
  Rng rng(12);
  for (int rep = 0; rep < 10; ++rep) {
    const SymMatrix sigma = random_psd(5, 2 + rep % 4, rng);
    const Vector star = random_normal_vector(5, rng);
    const double bf = bias_functional(sigma, 0.3, star);
    const Vector theta = regularized_minimizer(sigma, 0.3, star);
    EXPECT_NEAR(bf, regularized_gap(sigma, 0.3, theta, star), 1e-10 * (1 + bf));
    for (int c = 0; c < 1000; ++c) {
      Vector t = theta;
      const double step = std::pow(10.0, -3.0 * rng.uniform());
      for (double& x : t) x += step * rng.normal();
      EXPECT_LE(bf, regularized_gap(sigma, 0.3, t, star) + 1e-12);
    }
  }
}

TEST(RegularizedMinimizer, TrivialCases) {
  const Vector t{3.0, 1.0};
  for (double x : regularized_minimizer(SymMatrix::identity(2), 2.0, Vector(2, 0.0)))
    EXPECT_EQ(x, 0.0);
  const Vector m = regularized_minimizer(SymMatrix::identity(2), 2.0, t);
  EXPECT_NEAR(m[0], 1.0, 1e-15);
  EXPECT_NEAR(m[1], 1.0 / 3.0, 1e-15);
}

TEST(RegularizedMinimizer, SolvesNormalEquationsDensely) {
  Rng rng(13);
  const SymMatrix sigma = random_psd(4, 3, rng);
  const Vector star = random_normal_vector(4, rng);
  oracle::Dense shifted(sigma.entries().begin(), sigma.entries().end());
  for (std::size_t i = 0; i < 4; ++i) shifted[i * 4 + i] += 0.7;
  const auto want =
      oracle::apply(oracle::gauss_jordan_inverse(shifted, 4), matvec(sigma, star));
  const Vector got = regularized_minimizer(sigma, 0.7, star);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(got[i], want[i], 1e-10);
}

TEST(PopulationBias, TrivialAndCrossModule) {
  const Vector t{1.0, 1.0};
  EXPECT_NEAR(population_bias(SymMatrix::identity(2), 1.0, t), 2.0 / 4.0, 1e-15);
  EXPECT_EQ(population_bias(SymMatrix::identity(2), 1.0, Vector(2, 0.0)), 0.0);
  Rng rng(14);
  for (int rep = 0; rep < 10; ++rep) {
    const SymMatrix sigma = random_spd(6, rng);
    const Vector star = random_normal_vector(6, rng);
    const double lambda = 0.05 * (rep + 1);
    const Vector theta = regularized_minimizer(sigma, lambda, star);
    EXPECT_NEAR(population_bias(sigma, lambda, star), excess_risk(theta, sigma, star), 1e-10);
  }
}

TEST(Lemma1Terms, IdentityCase) {
  const Vector t{1.0, 2.0, 2.0};
  const auto terms =
      lemma1_terms(SymMatrix::identity(3), SymMatrix::identity(3), t, 0.5, 2.0, 10);
  EXPECT_NEAR(terms.bias_term, 0.25 * 9.0 / 2.25, 1e-14);
  EXPECT_NEAR(terms.variance_term, 4.0 * 3.0 / (10.0 * 1.5), 1e-14);
  EXPECT_EQ(lemma1_terms(SymMatrix::identity(3), SymMatrix::identity(3), t, 0.5, 0.0, 10)
                .variance_term,
            0.0);
}

TEST(Lemma1Terms, DenseProductOracle) {
  Rng rng(15);
  const SymMatrix sh = random_psd(4, 2, rng);
  const SymMatrix sigma = random_spd(4, rng);
  const Vector star = random_normal_vector(4, rng);
  const double lambda = 0.2;
  oracle::Dense a(sh.entries().begin(), sh.entries().end());
  for (std::size_t i = 0; i < 4; ++i) a[i * 4 + i] += lambda;
  const auto inv = oracle::gauss_jordan_inverse(a, 4);
  const oracle::Dense s(sigma.entries().begin(), sigma.entries().end());
  const auto inner = oracle::matmul(oracle::matmul(inv, s, 4), inv, 4);
  const auto tmp = oracle::apply(inner, star);
  double bias = 0.0;
  for (std::size_t i = 0; i < 4; ++i) bias += lambda * lambda * tmp[i] * star[i];
  const auto is = oracle::matmul(inv, s, 4);
  double tr = 0.0;
  for (std::size_t i = 0; i < 4; ++i) tr += is[i * 4 + i];
  const auto terms = lemma1_terms(sh, sigma, star, lambda, 1.5, 20);
  EXPECT_NEAR(terms.bias_term, bias, 1e-10 * (1 + bias));
  EXPECT_NEAR(terms.variance_term, 2.25 * tr / 20.0, 1e-10);
}

TEST(Theorem1Bound, ClosedForms) {
  const Vector zero(3, 0.0);
  EXPECT_EQ(theorem1_bound(SymMatrix::identity(3), zero, 0.1, 10, 2.0, 0.0).total, 0.0);

  const Vector t{1.0, -1.0, 0.5};
  const double lambda = 0.3, r = 1.7, sigma = 0.8;
  const std::size_t n = 25, d = 3;
  const double infl = 1.0 + r * r / (lambda * n);
  const double t2 = 2.25;
  const double want = infl * infl * lambda * t2 / (1 + lambda) +
                      infl * sigma * sigma * d / (n * (1 + lambda));
  const auto b = theorem1_bound(SymMatrix::identity(3), t, lambda, n, r, sigma);
  EXPECT_NEAR(b.total, want, 1e-13);
  EXPECT_NEAR(b.inflation, infl, 1e-15);
}

TEST(Theorem1Bound, CriticalLambdaDoublesInflation) {
  const Vector t{1.0, 2.0};
  const double r = 3.0;
  const std::size_t n = 18;
  const auto b = theorem1_bound(SymMatrix::identity(2), t, r * r / n, n, r, 1.0);
  EXPECT_NEAR(b.inflation, 2.0, 1e-15);
  EXPECT_NEAR(b.total, 4.0 * b.bias_part + 2.0 * b.variance_part, 1e-14);
  EXPECT_LE(b.bias_part, r * r / n * 5.0);
}

TEST(Theorem1Bound, Errors) {
  const Vector t{1.0};
  EXPECT_THROW(theorem1_bound(SymMatrix::identity(1), t, 0.0, 1, 1.0, 1.0), std::domain_error);
  EXPECT_THROW(theorem1_bound(SymMatrix::identity(1), t, 1.0, 0, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(theorem1_bound(SymMatrix::identity(1), t, 1.0, 1, 0.0, 1.0), std::invalid_argument);
}

}  // namespace
