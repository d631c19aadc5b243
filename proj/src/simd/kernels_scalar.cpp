#include "kernels_internal.hpp"

namespace ridgelab::simd::detail {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double weighted_dot_scalar(const double* w, const double* x, const double* y,
                           std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += w[i] * x[i] * y[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void rotate_scalar(double* x, double* y, std::size_t n, double c, double s) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

void syr_scalar(double alpha, const double* x, double* a, std::size_t d) {
  for (std::size_t i = 0; i < d; ++i) {
    const double ax = alpha * x[i];
    if (ax == 0.0) continue;
    axpy_scalar(ax, x, a + i * d, d);
  }
}

}  // namespace

const KernelTable kScalarTable{
    Isa::kScalar, dot_scalar,  weighted_dot_scalar, axpy_scalar,
    scale_scalar, rotate_scalar, syr_scalar,
};

}  // namespace ridgelab::simd::detail
