#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "oracles.hpp"
#include "ridgelab/harness.hpp"
#include "ridgelab/linalg.hpp"

namespace {

using namespace ridgelab;

SymMatrix random_symmetric(std::size_t d, Rng& rng) {
  std::vector<double> a(d * d);
  for (double& x : a) x = rng.normal();
  return SymMatrix(d, a);  // symmetrized on construction
}

oracle::Dense dense(const SymMatrix& m) { return {m.entries().begin(), m.entries().end()}; }

TEST(SymMatrix, SymmetrizesOnConstruction) {
  const SymMatrix m(2, {1.0, 2.0, 4.0, 3.0});
  EXPECT_EQ(m(0, 1), 3.0);
  EXPECT_EQ(m(1, 0), 3.0);
  EXPECT_THROW(SymMatrix(2, {1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST(EigSym, Identity) {
  const Eigensystem e = eig_sym(SymMatrix::identity(3));
  for (double v : e.values) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(EigSym, DiagonalGivesSortedValuesAndPermutationVectors) {
  const std::vector<double> diag{3.0, 1.0, 2.0};
  const Eigensystem e = eig_sym(SymMatrix::diagonal(diag));
  EXPECT_EQ(e.values, (std::vector<double>{1.0, 2.0, 3.0}));
  const std::size_t expected_axis[3] = {1, 2, 0};
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_EQ(e.vector(k)[i], i == expected_axis[k] ? 1.0 : 0.0);
    }
  }
}

TEST(EigSym, MatchesBisectionOracleOnRandomMatrices) {
  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const SymMatrix m = random_symmetric(5, rng);
    const auto want = oracle::bisection_eigenvalues(dense(m), 5);
    const Eigensystem e = eig_sym(m);
    for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(e.values[k], want[k], 1e-8);
  }
}

TEST(EigSym, ReconstructionAndOrthonormality) {
  Rng rng(9);
  for (std::size_t d : {1u, 2u, 7u, 30u, 64u}) {
    const SymMatrix m = random_symmetric(d, rng);
    const Eigensystem& e = m.eigen();
    const SymMatrix rebuilt = SymMatrix::from_spectrum(e.values, e.vectors);
    EXPECT_LE(op_norm(rebuilt - m), 1e-10 * (1.0 + op_norm(m)));
    double worst = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = 0; k < d; ++k) {
        const double g = simd::dot(e.vector(j), e.vector(k));
        worst = std::max(worst, std::abs(g - (j == k ? 1.0 : 0.0)));
      }
    }
    EXPECT_LE(worst, 1e-10);
    for (std::size_t k = 1; k < d; ++k) EXPECT_LE(e.values[k - 1], e.values[k]);
  }
}

TEST(EigSym, RejectsNonFinite) {
  EXPECT_THROW(eig_sym(SymMatrix(2, {1.0, NAN, NAN, 1.0})), std::invalid_argument);
}

TEST(ResolventApply, TrivialCases) {
  const Vector v{2.0, -4.0, 6.0};
  const Vector a = resolvent_apply(SymMatrix(3), 2.0, v);
  const Vector b = resolvent_apply(SymMatrix::identity(3), 1.0, v);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(a[i], v[i] / 2.0, 1e-15);
    EXPECT_NEAR(b[i], v[i] / 2.0, 1e-15);
  }
}

TEST(ResolventApply, MatchesGaussJordan) {
  Rng rng(21);
  const SymMatrix m = random_psd(4, 4, rng);
  const Vector v = random_normal_vector(4, rng);
  auto shifted_dense = dense(m);
  for (std::size_t i = 0; i < 4; ++i) shifted_dense[i * 4 + i] += 0.1;
  const auto want = oracle::apply(oracle::gauss_jordan_inverse(shifted_dense, 4), v);
  const Vector got = resolvent_apply(m, 0.1, v);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(got[i], want[i], 1e-10 * (1 + std::abs(want[i])));
}

TEST(ResolventApply, Errors) {
  const Vector v{1.0, 1.0};
  EXPECT_THROW(resolvent_apply(SymMatrix::identity(2), 0.0, v), std::domain_error);
  EXPECT_THROW(resolvent_apply(SymMatrix::identity(2), -1.0, v), std::domain_error);
  EXPECT_THROW(resolvent_apply(SymMatrix::identity(3), 1.0, v), std::invalid_argument);
  EXPECT_THROW(resolvent_apply(SymMatrix::diagonal(std::vector<double>{1.0, -1.0}), 1.0, v),
               std::domain_error);
}

TEST(CholeskySolve, MatchesGaussJordanAndRejectsIndefinite) {
  Rng rng(31);
  const SymMatrix s = random_spd(6, rng);
  const Vector b = random_normal_vector(6, rng);
  const auto want = oracle::apply(oracle::gauss_jordan_inverse(dense(s), 6), b);
  const Vector got = cholesky_solve(s, b);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(got[i], want[i], 1e-10);
  EXPECT_THROW(cholesky_solve(SymMatrix::diagonal(std::vector<double>{1.0, 0.0}), Vector{1, 1}),
               std::domain_error);
}

TEST(ShermanMorrison, UnitRankOne) {
  const auto r = sherman_morrison_apply(SymMatrix::identity(2), Vector{1.0, 0.0});
  EXPECT_NEAR(r.w[0], 0.5, 1e-15);
  EXPECT_NEAR(r.w[1], 0.0, 1e-15);
  EXPECT_NEAR(r.factor, 2.0, 1e-15);
  EXPECT_NEAR(r.factor * r.w[0], r.s_inv_v[0], 1e-15);
}

TEST(ShermanMorrison, ZeroVector) {
  const auto r = sherman_morrison_apply(SymMatrix::identity(3), Vector(3, 0.0));
  for (double x : r.w) EXPECT_EQ(x, 0.0);
  EXPECT_EQ(r.factor, 1.0);
}

TEST(ShermanMorrison, MatchesDenseInversion) {
  Rng rng(41);
  for (int rep = 0; rep < 50; ++rep) {
    const SymMatrix s = random_spd(3, rng);
    const Vector v = random_normal_vector(3, rng);
    auto updated = dense(s);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) updated[i * 3 + j] += v[i] * v[j];
    const auto want = oracle::apply(oracle::gauss_jordan_inverse(updated, 3), v);
    const auto r = sherman_morrison_apply(s, v);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(r.w[i], want[i], 1e-10);
    Vector resid = r.s_inv_v;
    simd::axpy(-r.factor, r.w, resid);
    EXPECT_LE(norm(resid), 1e-10 * norm(r.s_inv_v));
  }
}

TEST(ShermanMorrison, RejectsSingular) {
  EXPECT_THROW(sherman_morrison_apply(SymMatrix::diagonal(std::vector<double>{1.0, 0.0}),
                                      Vector{1.0, 1.0}),
               std::domain_error);
}

TEST(PsdOrder, TrivialCases) {
  const auto up = psd_order_leq(SymMatrix(2), SymMatrix::identity(2), 0.0);
  EXPECT_TRUE(up.holds);
  EXPECT_NEAR(up.min_eig_of_difference, 1.0, 1e-15);
  const auto down = psd_order_leq(SymMatrix::identity(2), SymMatrix(2), 0.0);
  EXPECT_FALSE(down.holds);
  EXPECT_NEAR(down.min_eig_of_difference, -1.0, 1e-15);
  EXPECT_THROW(psd_order_leq(SymMatrix(2), SymMatrix(2), -1.0), std::invalid_argument);
}

TEST(PsdOrder, SmoothedResolventBelowResolvent) {
  Rng rng(51);
  for (int rep = 0; rep < 20; ++rep) {
    const SymMatrix sh = random_psd(5, 1 + rep % 5, rng);
    const double lambda = 0.05 + 0.1 * rep;
    const SymMatrix res = resolvent(sh, lambda);
    const SymMatrix smoothed = congruence(res, sh);
    EXPECT_TRUE(psd_order_leq(smoothed, res, psd_tolerance(res)).holds);
  }
}

TEST(Convexity, EqualityAtIdentity) {
  const auto c = trace_inverse_convexity_check(SymMatrix::identity(4), SymMatrix::identity(4),
                                               SymMatrix::identity(4));
  EXPECT_NEAR(c.lhs, 4.0, 1e-14);
  EXPECT_NEAR(c.rhs, 4.0, 1e-14);
  EXPECT_TRUE(c.holds);
}

TEST(Convexity, DiagonalPair) {
  const auto c = trace_inverse_convexity_check(SymMatrix::diagonal(std::vector<double>{1, 4}),
                                               SymMatrix::diagonal(std::vector<double>{4, 1}),
                                               SymMatrix::identity(2));
  EXPECT_NEAR(c.lhs, 0.8, 1e-14);
  EXPECT_NEAR(c.rhs, 1.25, 1e-14);
  EXPECT_TRUE(c.holds);
}

TEST(Convexity, RandomTriples) {
  Rng rng(61);
  for (int rep = 0; rep < 1000; ++rep) {
    const SymMatrix a = random_spd(6, rng);
    const SymMatrix b = random_spd(6, rng);
    const SymMatrix s = random_psd(6, 1 + rep % 6, rng);
    EXPECT_TRUE(trace_inverse_convexity_check(a, b, s).holds);
  }
}

TEST(Convexity, RequiresDefiniteArguments) {
  const SymMatrix sing = SymMatrix::diagonal(std::vector<double>{1.0, 0.0});
  EXPECT_THROW(trace_inverse_convexity_check(sing, SymMatrix::identity(2), SymMatrix::identity(2)),
               std::domain_error);
}

TEST(Linalg, TraceProductAndNorms) {
  Rng rng(71);
  const SymMatrix a = random_symmetric(4, rng);
  const SymMatrix b = random_symmetric(4, rng);
  const auto ab = oracle::matmul(dense(a), dense(b), 4);
  double tr = 0.0;
  for (std::size_t i = 0; i < 4; ++i) tr += ab[i * 4 + i];
  EXPECT_NEAR(trace_product(a, b), tr, 1e-12);
  EXPECT_NEAR(frobenius_norm(a) * frobenius_norm(a), trace_product(a, a), 1e-12);
  const auto vals = oracle::bisection_eigenvalues(dense(a), 4);
  EXPECT_NEAR(op_norm(a), std::max(std::abs(vals.front()), std::abs(vals.back())), 1e-9);
}

TEST(Linalg, InverseAndSqrt) {
  Rng rng(81);
  const SymMatrix s = random_spd(5, rng);
  const auto want = oracle::gauss_jordan_inverse(dense(s), 5);
  const SymMatrix inv = inverse_pd(s);
  for (std::size_t i = 0; i < 25; ++i) EXPECT_NEAR(inv.entries()[i], want[i], 1e-9);
  const SymMatrix root = sqrt_psd(s);
  const auto sq = oracle::matmul(dense(root), dense(root), 5);
  for (std::size_t i = 0; i < 25; ++i) EXPECT_NEAR(sq[i], s.entries()[i], 1e-10);
}

}  // namespace
