#include "ridgelab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ridgelab {

namespace {

constexpr int kMaxJacobiSweeps = 100;
constexpr double kJacobiTolerance = 1e-12;

void check_same_dim(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("matrix dimension mismatch: " + std::to_string(a.dim()) +
                                " vs " + std::to_string(b.dim()));
  }
}

void check_vector_dim(const SymMatrix& m, std::span<const double> v) {
  if (m.dim() != v.size()) {
    throw std::invalid_argument("vector of length " + std::to_string(v.size()) +
                                " does not match matrix dimension " +
                                std::to_string(m.dim()));
  }
}

double off_diagonal_frobenius(const std::vector<double>& a, std::size_t d) {
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (i != j) s += a[i * d + j] * a[i * d + j];
    }
  }
  return std::sqrt(s);
}

}  // namespace

SymMatrix::SymMatrix(std::size_t dim)
    : dim_(dim), a_(dim * dim, 0.0), cache_(std::make_shared<Cache>()) {}

SymMatrix::SymMatrix(std::size_t dim, std::vector<double> entries)
    : dim_(dim), a_(std::move(entries)), cache_(std::make_shared<Cache>()) {
  if (a_.size() != dim * dim) {
    throw std::invalid_argument("SymMatrix: expected " + std::to_string(dim * dim) +
                                " entries, got " + std::to_string(a_.size()));
  }
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i + 1; j < dim; ++j) {
      const double s = 0.5 * (a_[i * dim + j] + a_[j * dim + i]);
      a_[i * dim + j] = s;
      a_[j * dim + i] = s;
    }
  }
}

SymMatrix SymMatrix::identity(std::size_t dim, double scale) {
  std::vector<double> a(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) a[i * dim + i] = scale;
  return SymMatrix(dim, std::move(a));
}

SymMatrix SymMatrix::diagonal(std::span<const double> diag) {
  const std::size_t d = diag.size();
  std::vector<double> a(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) a[i * d + i] = diag[i];
  return SymMatrix(d, std::move(a));
}

SymMatrix SymMatrix::from_spectrum(std::span<const double> values,
                                   std::span<const double> vectors) {
  const std::size_t d = values.size();
  if (vectors.size() != d * d) {
    throw std::invalid_argument("from_spectrum: eigenvector block has wrong size");
  }
  std::vector<double> a(d * d, 0.0);
  const auto& k = simd::active();
  for (std::size_t j = 0; j < d; ++j) {
    if (values[j] == 0.0) continue;
    k.syr(values[j], vectors.data() + j * d, a.data(), d);
  }
  return SymMatrix(d, std::move(a));
}

const Eigensystem& SymMatrix::eigen() const {
  if (!cache_) {
    // Default-constructed (dim 0) matrix.
    static const Eigensystem empty{};
    return empty;
  }
  std::call_once(cache_->once, [this] { cache_->eig = eig_sym(*this); });
  return cache_->eig;
}

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
  check_same_dim(a, b);
  std::vector<double> out(a.entries().begin(), a.entries().end());
  simd::axpy(1.0, b.entries(), out);
  return SymMatrix(a.dim(), std::move(out));
}

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
  check_same_dim(a, b);
  std::vector<double> out(a.entries().begin(), a.entries().end());
  simd::axpy(-1.0, b.entries(), out);
  return SymMatrix(a.dim(), std::move(out));
}

SymMatrix operator*(double alpha, const SymMatrix& a) {
  std::vector<double> out(a.entries().begin(), a.entries().end());
  simd::active().scale(alpha, out.data(), out.size());
  return SymMatrix(a.dim(), std::move(out));
}

SymMatrix shifted(const SymMatrix& a, double lambda) {
  std::vector<double> out(a.entries().begin(), a.entries().end());
  for (std::size_t i = 0; i < a.dim(); ++i) out[i * a.dim() + i] += lambda;
  return SymMatrix(a.dim(), std::move(out));
}

Vector matvec(const SymMatrix& m, std::span<const double> v) {
  check_vector_dim(m, v);
  Vector out(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i) out[i] = simd::dot(m.row(i), v);
  return out;
}

double quad_form(const SymMatrix& m, std::span<const double> v) {
  const Vector mv = matvec(m, v);
  return simd::dot(mv, v);
}

double trace(const SymMatrix& m) {
  double t = 0.0;
  for (std::size_t i = 0; i < m.dim(); ++i) t += m(i, i);
  return t;
}

double trace_product(const SymMatrix& a, const SymMatrix& b) {
  check_same_dim(a, b);
  return simd::dot(a.entries(), b.entries());
}

double frobenius_norm(const SymMatrix& m) {
  return std::sqrt(simd::dot(m.entries(), m.entries()));
}

double op_norm(const SymMatrix& m) {
  if (m.dim() == 0) return 0.0;
  const auto& vals = m.eigen().values;
  return std::max(std::abs(vals.front()), std::abs(vals.back()));
}

double norm(std::span<const double> v) { return std::sqrt(simd::dot(v, v)); }

SymMatrix congruence(const SymMatrix& outer, const SymMatrix& inner) {
  check_same_dim(outer, inner);
  const std::size_t d = outer.dim();
  // tmp = inner * outer, row by row: tmp_i = sum_k inner_ik outer_k.
  std::vector<double> tmp(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      const double c = inner(i, k);
      if (c != 0.0) simd::active().axpy(c, outer.row(k).data(), tmp.data() + i * d, d);
    }
  }
  std::vector<double> out(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      const double c = outer(i, k);
      if (c != 0.0) simd::active().axpy(c, tmp.data() + k * d, out.data() + i * d, d);
    }
  }
  return SymMatrix(d, std::move(out));
}

Vector diagonal_in_basis(const SymMatrix& m, const Eigensystem& basis) {
  if (basis.dim() != m.dim()) {
    throw std::invalid_argument("diagonal_in_basis: dimension mismatch");
  }
  Vector out(m.dim());
  for (std::size_t k = 0; k < m.dim(); ++k) out[k] = quad_form(m, basis.vector(k));
  return out;
}

Eigensystem eig_sym(const SymMatrix& m) {
  const std::size_t d = m.dim();
  for (double x : m.entries()) {
    if (!std::isfinite(x)) throw std::invalid_argument("eig_sym: non-finite matrix entry");
  }
  std::vector<double> a(m.entries().begin(), m.entries().end());
  // Rows of vt are the current eigenvector estimates.
  std::vector<double> vt(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) vt[i * d + i] = 1.0;

  const auto& kern = simd::active();
  const double scale = frobenius_norm(m);
  const double target = kJacobiTolerance * scale;

  int sweep = 0;
  for (; sweep < kMaxJacobiSweeps; ++sweep) {
    const double off = off_diagonal_frobenius(a, d);
    if (off <= target || off == 0.0) break;
    for (std::size_t p = 0; p + 1 < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double apq = a[p * d + q];
        if (apq == 0.0) continue;
        const double app = a[p * d + p];
        const double aqq = a[q * d + q];
        // Skip rotations that cannot change either diagonal entry.
        if (sweep > 3 && std::abs(app) + 100.0 * std::abs(apq) == std::abs(app) &&
            std::abs(aqq) + 100.0 * std::abs(apq) == std::abs(aqq)) {
          a[p * d + q] = 0.0;
          a[q * d + p] = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        kern.rotate(a.data() + p * d, a.data() + q * d, d, c, s);
        a[p * d + p] = app - t * apq;
        a[q * d + q] = aqq + t * apq;
        a[p * d + q] = 0.0;
        a[q * d + p] = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          if (k == p || k == q) continue;
          a[k * d + p] = a[p * d + k];
          a[k * d + q] = a[q * d + k];
        }
        kern.rotate(vt.data() + p * d, vt.data() + q * d, d, c, s);
      }
    }
  }
  if (sweep == kMaxJacobiSweeps) {
    throw std::runtime_error("eig_sym: Jacobi iteration did not converge");
  }

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a[i * d + i] < a[j * d + j];
  });

  Eigensystem out;
  out.values.resize(d);
  out.vectors.resize(d * d);
  for (std::size_t k = 0; k < d; ++k) {
    const std::size_t src = order[k];
    out.values[k] = a[src * d + src];
    double* dst = out.vectors.data() + k * d;
    std::copy_n(vt.data() + src * d, d, dst);
    // Sign convention: the largest-magnitude component is positive.
    std::size_t lead = 0;
    for (std::size_t i = 1; i < d; ++i) {
      if (std::abs(dst[i]) > std::abs(dst[lead])) lead = i;
    }
    if (dst[lead] < 0.0) kern.scale(-1.0, dst, d);
  }
  return out;
}

double psd_tolerance(const SymMatrix& m) { return 1e-10 * std::max(1.0, op_norm(m)); }

bool is_psd(const SymMatrix& m) {
  if (m.dim() == 0) return true;
  return m.eigen().values.front() >= -psd_tolerance(m);
}

void require_psd(const SymMatrix& m, const char* what) {
  if (!is_psd(m)) {
    throw std::domain_error(std::string(what) + ": matrix is not positive semi-definite");
  }
}

void require_positive_definite(const SymMatrix& m, const char* what) {
  if (m.dim() == 0 || !(m.eigen().values.front() > 0.0)) {
    throw std::domain_error(std::string(what) + ": matrix is not positive definite");
  }
}

SymMatrix resolvent(const SymMatrix& m, double lambda) {
  if (!(lambda > 0.0)) throw std::domain_error("resolvent: lambda must be positive");
  return spectral_map(m, [lambda](double mu) { return 1.0 / (mu + lambda); });
}

SymMatrix sqrt_psd(const SymMatrix& m) {
  return spectral_map(m, [](double mu) { return std::sqrt(std::max(mu, 0.0)); });
}

SymMatrix inverse_pd(const SymMatrix& m) {
  require_positive_definite(m, "inverse_pd");
  return spectral_map(m, [](double mu) { return 1.0 / mu; });
}

Vector resolvent_apply(const SymMatrix& m, double lambda, std::span<const double> v) {
  if (!(lambda > 0.0)) throw std::domain_error("resolvent_apply: lambda must be positive");
  check_vector_dim(m, v);
  require_psd(m, "resolvent_apply");
  return spectral_apply(m, [lambda](double mu) { return 1.0 / (mu + lambda); }, v);
}

Vector cholesky_solve(const SymMatrix& s, std::span<const double> b) {
  check_vector_dim(s, b);
  const std::size_t d = s.dim();
  // Lower factor, row-major.
  std::vector<double> l(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double partial =
          simd::active().dot(l.data() + i * d, l.data() + j * d, j);
      const double v = s(i, j) - partial;
      if (i == j) {
        if (!(v > 0.0)) {
          throw std::domain_error("cholesky_solve: matrix is not positive definite");
        }
        l[i * d + i] = std::sqrt(v);
      } else {
        l[i * d + j] = v / l[j * d + j];
      }
    }
  }
  Vector y(d);
  for (std::size_t i = 0; i < d; ++i) {
    y[i] = (b[i] - simd::active().dot(l.data() + i * d, y.data(), i)) / l[i * d + i];
  }
  Vector x(d);
  for (std::size_t ii = d; ii-- > 0;) {
    double acc = y[ii];
    for (std::size_t k = ii + 1; k < d; ++k) acc -= l[k * d + ii] * x[k];
    x[ii] = acc / l[ii * d + ii];
  }
  return x;
}

ShermanMorrisonResult sherman_morrison_apply(const SymMatrix& s,
                                             std::span<const double> v) {
  check_vector_dim(s, v);
  const auto& vals = s.eigen().values;
  if (s.dim() == 0 || !(vals.front() > 1e-14 * std::max(1.0, op_norm(s)))) {
    throw std::domain_error("sherman_morrison_apply: S is singular");
  }
  ShermanMorrisonResult out;
  out.s_inv_v = spectral_apply(s, [](double mu) { return 1.0 / mu; }, v);
  out.factor = 1.0 + simd::dot(out.s_inv_v, v);

  const std::size_t d = s.dim();
  std::vector<double> updated(s.entries().begin(), s.entries().end());
  simd::active().syr(1.0, v.data(), updated.data(), d);
  out.w = cholesky_solve(SymMatrix(d, std::move(updated)), v);
  return out;
}

PsdOrderResult psd_order_leq(const SymMatrix& a, const SymMatrix& b, double tol) {
  check_same_dim(a, b);
  if (!(tol >= 0.0)) throw std::invalid_argument("psd_order_leq: tolerance must be >= 0");
  const SymMatrix diff = b - a;
  const double min_eig = diff.dim() == 0 ? 0.0 : diff.eigen().values.front();
  return {min_eig, tol, min_eig >= -tol};
}

namespace {

// Tr(M^{-1} S) from the eigendecomposition of M.
double trace_inverse_times(const SymMatrix& m, const SymMatrix& s) {
  const Eigensystem& e = m.eigen();
  double t = 0.0;
  for (std::size_t k = 0; k < e.dim(); ++k) t += quad_form(s, e.vector(k)) / e.values[k];
  return t;
}

}  // namespace

ConvexityCheck trace_inverse_convexity_check(const SymMatrix& a, const SymMatrix& b,
                                             const SymMatrix& s) {
  check_same_dim(a, b);
  check_same_dim(a, s);
  require_positive_definite(a, "trace_inverse_convexity_check(A)");
  require_positive_definite(b, "trace_inverse_convexity_check(B)");
  require_psd(s, "trace_inverse_convexity_check(S)");
  const SymMatrix mid = 0.5 * (a + b);
  ConvexityCheck out;
  out.lhs = trace_inverse_times(mid, s);
  out.rhs = 0.5 * (trace_inverse_times(a, s) + trace_inverse_times(b, s));
  out.holds = out.lhs <= out.rhs + 1e-10 * (1.0 + std::abs(out.rhs));
  return out;
}

}  // namespace ridgelab
