#include "ridgelab/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ridgelab/synth.hpp"

namespace ridgelab {

namespace {

void require_lambda(double lambda, const char* what) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::domain_error(std::string(what) + ": lambda must be positive and finite");
  }
}

}  // namespace

Dataset::Dataset(std::size_t d, std::vector<double> xs, Vector ys, std::uint64_t seed)
    : d_(d), xs_(std::move(xs)), ys_(std::move(ys)), seed_(seed) {
  if (ys_.empty()) throw std::invalid_argument("dataset: n must be >= 1");
  if (d_ == 0) throw std::invalid_argument("dataset: dimension must be >= 1");
  if (xs_.size() != ys_.size() * d_) {
    throw std::invalid_argument("dataset: design has " + std::to_string(xs_.size()) +
                                " entries, expected n * d = " +
                                std::to_string(ys_.size() * d_));
  }
  for (double v : xs_) {
    if (!std::isfinite(v)) throw std::invalid_argument("dataset: non-finite design entry");
  }
  for (double v : ys_) {
    if (!std::isfinite(v)) throw std::invalid_argument("dataset: non-finite response");
  }
}

SymMatrix empirical_covariance(const Dataset& data) {
  const std::size_t d = data.dim();
  std::vector<double> acc(d * d, 0.0);
  const double w = 1.0 / static_cast<double>(data.n());
  const auto& k = simd::active();
  for (std::size_t i = 0; i < data.n(); ++i) k.syr(w, data.x(i).data(), acc.data(), d);
  return SymMatrix(d, std::move(acc));
}

Vector empirical_cross_moment(const Dataset& data) {
  Vector b(data.dim(), 0.0);
  const double w = 1.0 / static_cast<double>(data.n());
  for (std::size_t i = 0; i < data.n(); ++i) simd::axpy(w * data.ys()[i], data.x(i), b);
  return b;
}

RidgeModel ridge_fit_primal(const Dataset& data, double lambda) {
  require_lambda(lambda, "ridge_fit_primal");
  SymMatrix cov = empirical_covariance(data);
  Vector theta = resolvent_apply(cov, lambda, empirical_cross_moment(data));
  return {std::move(theta), lambda, std::move(cov)};
}

RidgeModel ridge_fit_dual(const Dataset& data, double lambda) {
  require_lambda(lambda, "ridge_fit_dual");
  const std::size_t n = data.n();
  const double shift = lambda * static_cast<double>(n);
  std::vector<double> gram(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double kij = simd::dot(data.x(i), data.x(j));
      gram[i * n + j] = kij;
      gram[j * n + i] = kij;
    }
    gram[i * n + i] += shift;
  }
  const Vector alpha = cholesky_solve(SymMatrix(n, std::move(gram)), data.ys());
  Vector theta(data.dim(), 0.0);
  for (std::size_t i = 0; i < n; ++i) simd::axpy(alpha[i], data.x(i), theta);
  return {std::move(theta), lambda, empirical_covariance(data)};
}

RidgeModel ridge_fit(const Dataset& data, double lambda) {
  return data.n() < data.dim() ? ridge_fit_dual(data, lambda) : ridge_fit_primal(data, lambda);
}

double ridge_objective(const Dataset& data, double lambda, std::span<const double> theta) {
  if (theta.size() != data.dim()) throw std::invalid_argument("ridge_objective: dimension mismatch");
  double loss = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    const double r = data.ys()[i] - simd::dot(theta, data.x(i));
    loss += r * r;
  }
  return loss / static_cast<double>(data.n()) + lambda * simd::dot(theta, theta);
}

double excess_risk(std::span<const double> theta, const SymMatrix& sigma,
                   std::span<const double> theta_star) {
  if (theta.size() != sigma.dim() || theta_star.size() != sigma.dim()) {
    throw std::invalid_argument("excess_risk: dimension mismatch");
  }
  Vector diff(theta.begin(), theta.end());
  simd::axpy(-1.0, theta_star, diff);
  return std::max(0.0, quad_form(sigma, diff));
}

double population_risk(std::span<const double> theta, const Problem& problem) {
  return excess_risk(theta, problem.design.covariance(), problem.theta_star) +
         problem.sigma * problem.sigma;
}

}  // namespace ridgelab
