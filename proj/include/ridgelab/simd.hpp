#pragma once

// Data-parallel inner loops used by the dense linear algebra.
//
// Every kernel has a scalar reference implementation. Vectorized variants
// (AVX2+FMA on x86-64, NEON on AArch64) are selected once at runtime from
// the host CPU; RIDGELAB_SIMD=scalar in the environment forces the
// reference path. All variants share the same signatures so tests can call
// each table directly and compare against the scalar one.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace ridgelab::simd {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa) noexcept;

struct KernelTable {
  Isa isa;

  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);

  // sum_i w[i] * x[i] * y[i]
  double (*weighted_dot)(const double* w, const double* x, const double* y,
                         std::size_t n);

  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);

  // x[i] *= alpha
  void (*scale)(double alpha, double* x, std::size_t n);

  // Plane rotation of two rows:
  //   x[i] <- c * x[i] - s * y[i]
  //   y[i] <- s * x[i] + c * y[i]
  void (*rotate)(double* x, double* y, std::size_t n, double c, double s);

  // Row-major d x d update a += alpha * x x^T.
  void (*syr)(double alpha, const double* x, double* a, std::size_t d);
};

const KernelTable& scalar_kernels() noexcept;

// Tables this binary was built with and the host can execute, scalar first.
std::vector<const KernelTable*> available_kernels();

// The table selected for this process (best available unless overridden).
const KernelTable& active() noexcept;

inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace ridgelab::simd
