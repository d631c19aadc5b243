#pragma once

// Ridge regression estimators and risk evaluation.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ridgelab/linalg.hpp"

namespace ridgelab {

struct Problem;

// n observations (X_i, Y_i) in R^d x R, stored row-major.
class Dataset {
 public:
  // Throws std::invalid_argument when n == 0, the shapes disagree or an
  // entry is not finite.
  Dataset(std::size_t d, std::vector<double> xs, Vector ys, std::uint64_t seed = 0);

  std::size_t n() const noexcept { return ys_.size(); }
  std::size_t dim() const noexcept { return d_; }
  std::span<const double> x(std::size_t i) const { return {xs_.data() + i * d_, d_}; }
  std::span<const double> xs() const noexcept { return xs_; }
  std::span<const double> ys() const noexcept { return ys_; }
  // Seed the dataset was drawn with, for provenance.
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::size_t d_;
  std::vector<double> xs_;
  Vector ys_;
  std::uint64_t seed_;
};

struct RidgeModel {
  Vector theta_hat;
  double lambda;
  SymMatrix sigma_hat_n;
};

// (1/n) sum_i X_i X_i^T
SymMatrix empirical_covariance(const Dataset& data);

// (1/n) sum_i Y_i X_i
Vector empirical_cross_moment(const Dataset& data);

// theta = (Sigma_hat + lambda)^{-1} (1/n) sum_i Y_i X_i, spectrally.
RidgeModel ridge_fit_primal(const Dataset& data, double lambda);

// theta = X^T (K + lambda n)^{-1} y with K_ij = <X_i, X_j>, by Cholesky on
// the n x n Gram matrix.
RidgeModel ridge_fit_dual(const Dataset& data, double lambda);

// Dual when n < d, primal otherwise.
RidgeModel ridge_fit(const Dataset& data, double lambda);

// (1/n) sum_i (Y_i - <theta, X_i>)^2 + lambda ||theta||^2
double ridge_objective(const Dataset& data, double lambda, std::span<const double> theta);

// <Sigma (theta - theta*), theta - theta*>
double excess_risk(std::span<const double> theta, const SymMatrix& sigma,
                   std::span<const double> theta_star);

// E[(Y - <theta, X>)^2] = excess_risk + sigma^2 under the synthetic noise model.
double population_risk(std::span<const double> theta, const Problem& problem);

}  // namespace ridgelab
