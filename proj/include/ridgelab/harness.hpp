#pragma once

// Seeded Monte Carlo certification of the ridge risk bounds.
//
// Each trial draws only the design points; the Gaussian noise is integrated
// out in closed form, so a trial contributes the exact conditional
// expectation given X_1..X_n. Trials are grouped into fixed blocks of
// kTrialBlock consecutive indices; blocks run on any number of threads and
// are reduced in index order, which keeps every report bit-identical
// regardless of the thread count.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ridgelab/functionals.hpp"
#include "ridgelab/linalg.hpp"
#include "ridgelab/synth.hpp"

namespace ridgelab {

inline constexpr std::size_t kTrialBlock = 64;

struct ExperimentConfig {
  Problem problem;
  std::size_t n = 1;
  std::vector<double> lambda_grid;
  std::size_t trials = 2;
  std::uint64_t base_seed = 0;
  double se_multiplier = 3.0;
  unsigned jobs = 1;

  // Throws std::invalid_argument on trials < 2, n == 0, an empty grid or a
  // non-positive lambda, and forwards Problem::validate().
  void validate() const;
};

// One certified inequality "lhs <= rhs". For lower-bound checks the Monte
// Carlo quantity sits on the right-hand side; lhs_stderr always carries the
// standard error that buys the statistical slack.
struct BoundReport {
  std::string name;
  double lhs_estimate = 0.0;
  double lhs_stderr = 0.0;
  double rhs_value = 0.0;
  double margin = 0.0;  // rhs_value - lhs_estimate
  bool pass = false;
  std::size_t trials = 0;
  double lambda = 0.0;
  std::size_t n = 0;
};

// Fills margin and pass: pass <=> lhs <= rhs + k * stderr.
BoundReport make_report(std::string name, double lhs, double stderr_, double rhs, double k,
                        std::size_t trials, double lambda, std::size_t n);

struct MeanStderr {
  double mean;
  double stderr_;
};

// Arithmetic mean and sample standard deviation / sqrt(count).
// Throws std::invalid_argument on fewer than two samples.
MeanStderr mc_mean_and_stderr(std::span<const double> samples);

// Running mean of equally sized symmetric matrices with a Frobenius-norm
// standard error of the entrywise mean.
class MatrixMeanAccumulator {
 public:
  explicit MatrixMeanAccumulator(std::size_t dim = 0);

  void add(std::span<const double> entries);
  void add(const SymMatrix& m) { add(m.entries()); }
  void merge(const MatrixMeanAccumulator& other);

  std::size_t count() const noexcept { return count_; }
  std::size_t dim() const noexcept { return dim_; }
  SymMatrix mean() const;
  // sqrt( sum_entries sample_var(entry) / count )
  double frobenius_stderr() const;

 private:
  std::size_t dim_;
  std::vector<double> sum_;
  double sum_sq_frobenius_ = 0.0;
  std::size_t count_ = 0;
};

// Runs body(trial_index, block_index) for trial_index in [0, trials) on
// `jobs` threads. Blocks of kTrialBlock consecutive trials are the unit of
// work; body must only touch state owned by its block.
void run_trial_blocks(std::size_t trials, unsigned jobs,
                      const std::function<void(std::size_t, std::size_t)>& body);

inline std::size_t trial_block_count(std::size_t trials) {
  return (trials + kTrialBlock - 1) / kTrialBlock;
}

// Exact expectation over every n-sample multiset of design atoms:
// calls fn(sigma_hat, probability) once per composition of n into the atom
// counts. Throws std::invalid_argument when there are more than
// `max_terms` compositions.
void enumerate_design_expectation(const DesignDistribution& design, std::size_t n,
                                  const std::function<void(const SymMatrix&, double)>& fn,
                                  std::size_t max_terms = 2'000'000);

// Conditional excess risk given the design, noise integrated out:
//   lambda^2 ||(S + lambda)^{-1} theta*||_Sigma^2
//     + (sigma^2 / n^2) sum_i ||(S + lambda)^{-1} X_i||_Sigma^2
double conditional_excess_risk(const Dataset& data, const Problem& problem, double lambda);

std::vector<BoundReport> verify_lemma1(const ExperimentConfig& cfg);
std::vector<BoundReport> verify_lemma2(const ExperimentConfig& cfg);
std::vector<BoundReport> verify_lemma3(const ExperimentConfig& cfg);
std::vector<BoundReport> verify_theorem1(const ExperimentConfig& cfg);

// Exact counterparts of the lemma 2 and 3 checks by enumeration of every
// n-sample; zero statistical slack.
std::vector<BoundReport> verify_lemma2_exact(const Problem& problem, std::size_t n,
                                             std::span<const double> lambdas);
std::vector<BoundReport> verify_lemma3_exact(const Problem& problem, std::size_t n,
                                             std::span<const double> lambdas);

// Deterministic identity checks on the configured problem and on seeded
// random matrices (cfg.trials instances each).
std::vector<BoundReport> verify_lemma4_identity(const ExperimentConfig& cfg);
std::vector<BoundReport> verify_lemma5_convexity(const ExperimentConfig& cfg);
std::vector<BoundReport> verify_lemma6_identity(const ExperimentConfig& cfg);

enum class SweepParameter { kLambda, kN };

struct SweepSpec {
  SweepParameter parameter = SweepParameter::kLambda;
  std::vector<double> values;
  bool monte_carlo = true;
};

struct SweepRow {
  double value;
  double d_lambda;
  double bias_functional;
  double population_bias;
  double mc_excess_risk;  // NaN when the sweep skips sampling
  double theorem1_total;
};

struct SlopeFit {
  std::string quantity;
  double slope;
  double expected;   // NaN when only reported
  double tolerance;  // NaN when only reported
  bool pass;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SlopeFit> fits;
};

// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

// Tabulates the closed-form functionals (and optionally a Monte Carlo
// excess risk) along lambda or n, then fits log-log slopes on the interior
// points (first and last dropped). Throws std::invalid_argument on fewer
// than four values or values that are not positive and increasing.
SweepResult rate_sweep(const ExperimentConfig& cfg, const SweepSpec& sweep);

// Reports for the rate checks built from a lambda sweep.
std::vector<BoundReport> rate_dlambda_reports(const ExperimentConfig& cfg,
                                              const SweepResult& sweep);
std::vector<BoundReport> rate_bias_reports(const ExperimentConfig& cfg,
                                           const SweepResult& sweep);

// Theorem 1 total divided by (sigma^2 d + R^2 ||theta*||^2) / n.
double finite_dimension_ratio(const Problem& problem, std::size_t n, double lambda);

// Random positive-definite matrix A A^T / d + floor * I with Gaussian A.
SymMatrix random_spd(std::size_t d, Rng& rng, double floor = 0.1);
// Random PSD matrix B B^T with B of shape d x rank.
SymMatrix random_psd(std::size_t d, std::size_t rank, Rng& rng);
// Haar-like orthonormal rows from Gram-Schmidt on a Gaussian matrix.
std::vector<double> random_orthonormal_rows(std::size_t d, Rng& rng);
Vector random_normal_vector(std::size_t d, Rng& rng);

}  // namespace ridgelab
