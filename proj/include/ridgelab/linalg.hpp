#pragma once

// Dense symmetric linear algebra.
//
// SymMatrix is an immutable, row-major d x d symmetric matrix. Its
// eigendecomposition is computed on first use (cyclic Jacobi) and shared
// by every copy, so resolvents, square roots and traces evaluated on the
// same matrix reuse one factorization.

#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "ridgelab/simd.hpp"

namespace ridgelab {

using Vector = std::vector<double>;

struct Eigensystem {
  // Ascending.
  std::vector<double> values;
  // Row-major d x d; row k is the unit eigenvector for values[k].
  std::vector<double> vectors;

  std::size_t dim() const noexcept { return values.size(); }
  std::span<const double> vector(std::size_t k) const {
    return {vectors.data() + k * dim(), dim()};
  }
};

class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t dim);
  // Symmetrizes as (M + M^T) / 2. Throws std::invalid_argument when the
  // entry count is not dim * dim.
  SymMatrix(std::size_t dim, std::vector<double> entries);

  static SymMatrix identity(std::size_t dim, double scale = 1.0);
  static SymMatrix diagonal(std::span<const double> diag);
  // sum_k values[k] * u_k u_k^T where u_k is row k of `vectors`.
  static SymMatrix from_spectrum(std::span<const double> values,
                                 std::span<const double> vectors);

  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * dim_ + j]; }
  std::span<const double> row(std::size_t i) const { return {a_.data() + i * dim_, dim_}; }
  std::span<const double> entries() const noexcept { return a_; }

  // Cached; thread-safe. Throws std::invalid_argument on non-finite entries.
  const Eigensystem& eigen() const;

 private:
  struct Cache {
    std::once_flag once;
    Eigensystem eig;
  };

  std::size_t dim_ = 0;
  std::vector<double> a_;
  std::shared_ptr<Cache> cache_;
};

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator*(double alpha, const SymMatrix& a);
// a + lambda * I
SymMatrix shifted(const SymMatrix& a, double lambda);

Vector matvec(const SymMatrix& m, std::span<const double> v);
double quad_form(const SymMatrix& m, std::span<const double> v);
double trace(const SymMatrix& m);
// Tr(AB) for symmetric A, B.
double trace_product(const SymMatrix& a, const SymMatrix& b);
double frobenius_norm(const SymMatrix& m);
double op_norm(const SymMatrix& m);
double norm(std::span<const double> v);
// outer * inner * outer
SymMatrix congruence(const SymMatrix& outer, const SymMatrix& inner);
// u^T M u for each eigenvector u of `basis`; the diagonal of M in that basis.
Vector diagonal_in_basis(const SymMatrix& m, const Eigensystem& basis);

// Cyclic Jacobi; converged when the off-diagonal Frobenius norm drops to
// 1e-12 * ||M||_F. Throws std::invalid_argument on non-finite entries.
Eigensystem eig_sym(const SymMatrix& m);

// Smallest eigenvalue accepted for a PSD matrix: -1e-10 * max(1, ||M||_op).
double psd_tolerance(const SymMatrix& m);
bool is_psd(const SymMatrix& m);
// Throws std::domain_error naming `what` when m is not PSD within tolerance.
void require_psd(const SymMatrix& m, const char* what);
void require_positive_definite(const SymMatrix& m, const char* what);

// V f(mu) V^T with f applied to each eigenvalue.
template <class F>
SymMatrix spectral_map(const SymMatrix& m, F f) {
  const Eigensystem& e = m.eigen();
  std::vector<double> mapped(e.dim());
  for (std::size_t k = 0; k < e.dim(); ++k) mapped[k] = f(e.values[k]);
  return SymMatrix::from_spectrum(mapped, e.vectors);
}

// V f(mu) V^T v
template <class F>
Vector spectral_apply(const SymMatrix& m, F f, std::span<const double> v) {
  const Eigensystem& e = m.eigen();
  const std::size_t d = e.dim();
  Vector out(d, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    const auto u = e.vector(k);
    simd::axpy(f(e.values[k]) * simd::dot(u, v), u, out);
  }
  return out;
}

// (M + lambda)^{-1}
SymMatrix resolvent(const SymMatrix& m, double lambda);
// M^{1/2}; eigenvalues below zero are clamped to zero first.
SymMatrix sqrt_psd(const SymMatrix& m);
SymMatrix inverse_pd(const SymMatrix& m);

// (M + lambda)^{-1} v for PSD M. Throws std::domain_error when lambda <= 0.
Vector resolvent_apply(const SymMatrix& m, double lambda, std::span<const double> v);

// Solves S x = b by Cholesky. Throws std::domain_error when S is not
// numerically positive definite.
Vector cholesky_solve(const SymMatrix& s, std::span<const double> b);

struct ShermanMorrisonResult {
  Vector w;         // (S + v v^T)^{-1} v, by direct factorization of S + v v^T
  double factor;    // 1 + <S^{-1} v, v>
  Vector s_inv_v;   // S^{-1} v, from the spectral decomposition of S
};

// Rank-one update identity S^{-1} v = (1 + <S^{-1} v, v>) (S + v v^T)^{-1} v.
// The two sides are computed by independent routes so callers can check it.
ShermanMorrisonResult sherman_morrison_apply(const SymMatrix& s,
                                             std::span<const double> v);

struct PsdOrderResult {
  double min_eig_of_difference;
  double tolerance_used;
  bool holds;
};

// A <= B in the PSD order: lambda_min(B - A) >= -tol.
PsdOrderResult psd_order_leq(const SymMatrix& a, const SymMatrix& b, double tol);

struct ConvexityCheck {
  double lhs;
  double rhs;
  bool holds;
};

// Midpoint convexity of A -> Tr(A^{-1} S):
//   Tr(((A+B)/2)^{-1} S) <= (Tr(A^{-1} S) + Tr(B^{-1} S)) / 2.
ConvexityCheck trace_inverse_convexity_check(const SymMatrix& a, const SymMatrix& b,
                                             const SymMatrix& s);

}  // namespace ridgelab
