#pragma once

// Spectral functionals of the population covariance: effective dimension,
// regularized bias, and the two sides of the excess-risk bounds.
//
// Everything here is evaluated from the cached eigendecomposition of the
// covariance argument, so sweeping lambda costs O(d^2) per point.

#include <cstddef>
#include <span>

#include "ridgelab/linalg.hpp"

namespace ridgelab {

// Tr[(Sigma + lambda)^{-1} Sigma] = sum_i mu_i / (mu_i + lambda)
double effective_dimension(const SymMatrix& sigma, double lambda);

// lambda <(Sigma + lambda)^{-1} Sigma theta*, theta*>, which equals
// inf_theta {L(theta) + lambda ||theta||^2} - L(theta*).
double bias_functional(const SymMatrix& sigma, double lambda,
                       std::span<const double> theta_star);

// theta_lambda = (Sigma + lambda)^{-1} Sigma theta*, the minimizer of
// L(theta) + lambda ||theta||^2.
Vector regularized_minimizer(const SymMatrix& sigma, double lambda,
                             std::span<const double> theta_star);

// lambda^2 <(Sigma + lambda)^{-2} Sigma theta*, theta*> = excess risk of theta_lambda.
double population_bias(const SymMatrix& sigma, double lambda,
                       std::span<const double> theta_star);

// L(theta) + lambda ||theta||^2 - L(theta*) = ||theta - theta*||_Sigma^2 + lambda ||theta||^2
double regularized_gap(const SymMatrix& sigma, double lambda, std::span<const double> theta,
                       std::span<const double> theta_star);

struct Lemma1Terms {
  double bias_term;      // lambda^2 <(S + lambda)^{-1} Sigma (S + lambda)^{-1} theta*, theta*>
  double variance_term;  // (sigma^2 / n) Tr[(S + lambda)^{-1} Sigma]
};

// Error decomposition terms for one empirical covariance S.
Lemma1Terms lemma1_terms(const SymMatrix& sigma_hat, const SymMatrix& sigma,
                         std::span<const double> theta_star, double lambda,
                         double noise_sigma, std::size_t n);

struct Theorem1Bound {
  double inflation;      // 1 + R^2 / (lambda n)
  double bias_part;      // bias_functional
  double variance_part;  // sigma^2 d_lambda / n
  double total;          // inflation^2 bias_part + inflation variance_part
};

Theorem1Bound theorem1_bound(const SymMatrix& sigma, std::span<const double> theta_star,
                             double lambda, std::size_t n, double radius,
                             double noise_sigma);

}  // namespace ridgelab
