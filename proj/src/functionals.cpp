#include "ridgelab/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ridgelab {

namespace {

void require_lambda(double lambda, const char* what) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::domain_error(std::string(what) + ": lambda must be positive and finite");
  }
}

void require_dim(const SymMatrix& m, std::span<const double> v, const char* what) {
  if (m.dim() != v.size()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  }
}

// sum_k f(mu_k) <u_k, v>^2 over the eigenpairs of m.
template <class F>
double spectral_quadratic(const SymMatrix& m, std::span<const double> v, F f) {
  const Eigensystem& e = m.eigen();
  double acc = 0.0;
  for (std::size_t k = 0; k < e.dim(); ++k) {
    const double c = simd::dot(e.vector(k), v);
    if (c != 0.0) acc += f(std::max(e.values[k], 0.0)) * c * c;
  }
  return acc;
}

}  // namespace

double effective_dimension(const SymMatrix& sigma, double lambda) {
  require_lambda(lambda, "effective_dimension");
  double acc = 0.0;
  for (double mu : sigma.eigen().values) {
    const double m = std::max(mu, 0.0);
    acc += m / (m + lambda);
  }
  return acc;
}

double bias_functional(const SymMatrix& sigma, double lambda,
                       std::span<const double> theta_star) {
  require_lambda(lambda, "bias_functional");
  require_dim(sigma, theta_star, "bias_functional");
  return spectral_quadratic(sigma, theta_star,
                            [lambda](double mu) { return lambda * mu / (mu + lambda); });
}

Vector regularized_minimizer(const SymMatrix& sigma, double lambda,
                             std::span<const double> theta_star) {
  require_lambda(lambda, "regularized_minimizer");
  require_dim(sigma, theta_star, "regularized_minimizer");
  return spectral_apply(
      sigma,
      [lambda](double mu) {
        const double m = std::max(mu, 0.0);
        return m / (m + lambda);
      },
      theta_star);
}

double population_bias(const SymMatrix& sigma, double lambda,
                       std::span<const double> theta_star) {
  require_lambda(lambda, "population_bias");
  require_dim(sigma, theta_star, "population_bias");
  return spectral_quadratic(sigma, theta_star, [lambda](double mu) {
    const double s = lambda / (mu + lambda);
    return s * s * mu;
  });
}

double regularized_gap(const SymMatrix& sigma, double lambda, std::span<const double> theta,
                       std::span<const double> theta_star) {
  require_dim(sigma, theta, "regularized_gap");
  require_dim(sigma, theta_star, "regularized_gap");
  Vector diff(theta.begin(), theta.end());
  simd::axpy(-1.0, theta_star, diff);
  return quad_form(sigma, diff) + lambda * simd::dot(theta, theta);
}

Lemma1Terms lemma1_terms(const SymMatrix& sigma_hat, const SymMatrix& sigma,
                         std::span<const double> theta_star, double lambda,
                         double noise_sigma, std::size_t n) {
  require_lambda(lambda, "lemma1_terms");
  require_dim(sigma, theta_star, "lemma1_terms");
  if (sigma_hat.dim() != sigma.dim()) {
    throw std::invalid_argument("lemma1_terms: covariance dimension mismatch");
  }
  if (n == 0) throw std::invalid_argument("lemma1_terms: n must be >= 1");
  if (!(noise_sigma >= 0.0)) throw std::invalid_argument("lemma1_terms: sigma must be >= 0");

  const auto inv = [lambda](double mu) { return 1.0 / (std::max(mu, 0.0) + lambda); };
  const Vector w = spectral_apply(sigma_hat, inv, theta_star);
  Lemma1Terms out{};
  out.bias_term = std::max(0.0, lambda * lambda * quad_form(sigma, w));

  const Eigensystem& e = sigma_hat.eigen();
  double tr = 0.0;
  for (std::size_t k = 0; k < e.dim(); ++k) tr += inv(e.values[k]) * quad_form(sigma, e.vector(k));
  out.variance_term =
      std::max(0.0, noise_sigma * noise_sigma / static_cast<double>(n) * tr);
  return out;
}

Theorem1Bound theorem1_bound(const SymMatrix& sigma, std::span<const double> theta_star,
                             double lambda, std::size_t n, double radius,
                             double noise_sigma) {
  require_lambda(lambda, "theorem1_bound");
  if (n == 0) throw std::invalid_argument("theorem1_bound: n must be >= 1");
  if (!(radius > 0.0)) throw std::invalid_argument("theorem1_bound: R must be positive");
  if (!(noise_sigma >= 0.0)) throw std::invalid_argument("theorem1_bound: sigma must be >= 0");
  const double nn = static_cast<double>(n);
  Theorem1Bound out{};
  out.inflation = 1.0 + radius * radius / (lambda * nn);
  out.bias_part = bias_functional(sigma, lambda, theta_star);
  out.variance_part = noise_sigma * noise_sigma * effective_dimension(sigma, lambda) / nn;
  out.total = out.inflation * out.inflation * out.bias_part + out.inflation * out.variance_part;
  return out;
}

}  // namespace ridgelab
