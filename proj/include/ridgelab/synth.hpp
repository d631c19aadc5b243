#pragma once

// Synthetic problem instances with exactly known covariance.
//
// Designs are finitely supported, so E[X X^T] and the a.s. bound ||X|| <= R
// are computed by enumeration rather than estimated. Responses follow
// Y = <theta*, X> + sigma * Z with Z standard normal and independent of X.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ridgelab/linalg.hpp"
#include "ridgelab/model.hpp"
#include "ridgelab/rng.hpp"

namespace ridgelab {

struct Atom {
  Vector x;
  double probability;
};

class DesignDistribution {
 public:
  // Validates the atoms (common dimension, finite, probabilities >= 0 and
  // summing to one within 1e-12) and precomputes Sigma and R.
  explicit DesignDistribution(std::vector<Atom> atoms);

  std::size_t dim() const noexcept { return d_; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  // max ||x|| over the support.
  double radius() const noexcept { return radius_; }
  // sum_a p_a x_a x_a^T
  const SymMatrix& covariance() const noexcept { return sigma_; }
  // sum_a p_a x_a
  Vector mean() const;

  std::size_t sample_index(Rng& rng) const;

 private:
  std::size_t d_ = 0;
  std::vector<Atom> atoms_;
  std::vector<double> cumulative_;
  double radius_ = 0.0;
  SymMatrix sigma_;
};

struct SpectrumParams {
  double b;
  double budget;  // B with Tr(Sigma^{1/b}) <= B
};

struct SourceParams {
  double r;
  double rho;
};

struct Problem {
  DesignDistribution design;
  Vector theta_star;
  double sigma = 0.0;
  std::optional<SpectrumParams> spectrum;
  std::optional<SourceParams> source;

  std::size_t dim() const noexcept { return design.dim(); }
  // Throws std::invalid_argument when an invariant fails: dimension of
  // theta*, sigma >= 0, the source norm equal to rho and the spectral
  // budget within B (both to 1e-10).
  void validate() const;
};

// Atoms +-sqrt(d mu_i) u_i with probability 1/(2d) each, where u_i is the
// i-th standard basis vector, or row i of `basis` when given (orthonormal
// rows). E[X X^T] = sum_i mu_i u_i u_i^T and R = sqrt(d max_i mu_i).
// Throws std::invalid_argument for negative, increasing or all-zero spectra.
DesignDistribution make_bounded_design(std::span<const double> spectrum,
                                       std::span<const double> basis = {});

// Direction of theta* inside the source ball.
struct SourceDirection {
  enum class Kind {
    // theta* = c Sigma^{r/2} u, u uniform over the positive eigendirections.
    kUniform,
    // theta* = c Sigma^{r/2} u_1 for the leading eigenvector u_1.
    kLeading,
    // theta* = c Sigma^{(r-1)/2} w with w_k proportional to mu_k^{1/(2b)}:
    // for mu_k ~ k^{-b} the weights w_k^2 ~ 1/k put equal mass on every
    // scale, so the source condition is tight for exponent r and no larger.
    kCritical,
  };
  Kind kind = Kind::kUniform;
  double decay_b = 0.0;  // used by kCritical, must be > 1
};

// theta* with ||Sigma^{(1-r)/2} theta*|| = rho exactly.
// Throws std::domain_error when Sigma has no positive eigenvalue or r <= 0,
// std::invalid_argument when rho < 0.
Vector make_source_target(const SymMatrix& sigma, double r, double rho,
                          SourceDirection direction = {});

// Norm of Sigma^{(1-r)/2} theta*.
double source_norm(const SymMatrix& sigma, double r, std::span<const double> theta_star);

// Tr(Sigma^{1/b}). Throws std::domain_error when b <= 1.
double spectrum_budget(const SymMatrix& sigma, double b);

// n i.i.d. draws: per sample, one atom index then one normal for the noise.
// Throws std::invalid_argument when n == 0.
Dataset sample_dataset(const Problem& problem, std::size_t n, std::uint64_t seed);

// Atom indices only, drawn from the same stream layout as sample_dataset.
std::vector<std::size_t> sample_design_indices(const DesignDistribution& design,
                                               std::size_t n, std::uint64_t seed);

// mu_i = i^{-b}, i = 1..d
Vector polynomial_spectrum(std::size_t d, double b);

}  // namespace ridgelab
