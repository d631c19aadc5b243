#include "ridgelab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "ridgelab/model.hpp"

namespace ridgelab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double inflation(double radius, double lambda, std::size_t n) {
  return 1.0 + radius * radius / (lambda * static_cast<double>(n));
}

// Sigma_hat expressed in its own eigenbasis, with the population covariance
// and theta* rotated into the same basis.
struct TrialGeometry {
  std::size_t d = 0;
  Vector s;                  // eigenvalues of Sigma_hat, clamped at zero
  std::vector<double> v;     // rows: eigenvectors of Sigma_hat
  std::vector<double> g;     // g[j*d+k] = v_j^T Sigma v_k
  Vector c;                  // c[j] = <v_j, theta*>
};

TrialGeometry make_geometry(const SymMatrix& sigma_hat, const SymMatrix& sigma,
                            std::span<const double> theta_star) {
  const Eigensystem& e = sigma_hat.eigen();
  TrialGeometry t;
  t.d = e.dim();
  const std::size_t d = t.d;
  t.s.resize(d);
  for (std::size_t j = 0; j < d; ++j) t.s[j] = std::max(e.values[j], 0.0);
  t.v = e.vectors;
  t.c.resize(d);
  for (std::size_t j = 0; j < d; ++j) t.c[j] = simd::dot(e.vector(j), theta_star);
  // sv[j] = Sigma v_j
  std::vector<double> sv(d * d);
  for (std::size_t j = 0; j < d; ++j) {
    const Vector col = matvec(sigma, e.vector(j));
    std::copy(col.begin(), col.end(), sv.begin() + static_cast<std::ptrdiff_t>(j * d));
  }
  t.g.resize(d * d);
  const auto& k = simd::active();
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t l = 0; l <= j; ++l) {
      const double gjl = k.dot(t.v.data() + j * d, sv.data() + l * d, d);
      t.g[j * d + l] = gjl;
      t.g[l * d + j] = gjl;
    }
  }
  return t;
}

struct LambdaTerms {
  double trace_resolvent;  // Tr[(S + lambda)^{-1} Sigma]
  double bias;             // lambda^2 <(S+l)^{-1} Sigma (S+l)^{-1} theta*, theta*>
  double smoothed_trace;   // Tr[(S+l)^{-1} S (S+l)^{-1} Sigma]
};

LambdaTerms lambda_terms(const TrialGeometry& t, double lambda, std::vector<double>& rc) {
  const std::size_t d = t.d;
  LambdaTerms out{0.0, 0.0, 0.0};
  rc.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double r = 1.0 / (t.s[j] + lambda);
    const double gjj = t.g[j * d + j];
    out.trace_resolvent += r * gjj;
    out.smoothed_trace += t.s[j] * r * r * gjj;
    rc[j] = r * t.c[j];
  }
  double quad = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    if (rc[j] == 0.0) continue;
    quad += rc[j] * simd::active().dot(t.g.data() + j * d, rc.data(), d);
  }
  out.bias = std::max(0.0, lambda * lambda * quad);
  return out;
}

// (S + lambda)^{-1} Sigma (S + lambda)^{-1} in the original coordinates.
void sandwich_matrix(const TrialGeometry& t, double lambda, std::vector<double>& out,
                     std::vector<double>& scratch) {
  const std::size_t d = t.d;
  const auto& k = simd::active();
  // scratch = W V with W_jl = r_j g_jl r_l.
  scratch.assign(d * d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    const double rj = 1.0 / (t.s[j] + lambda);
    for (std::size_t l = 0; l < d; ++l) {
      const double w = rj * t.g[j * d + l] / (t.s[l] + lambda);
      if (w != 0.0) k.axpy(w, t.v.data() + l * d, scratch.data() + j * d, d);
    }
  }
  // out = V^T scratch
  out.assign(d * d, 0.0);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t j = 0; j < d; ++j) {
      const double vja = t.v[j * d + a];
      if (vja != 0.0) k.axpy(vja, scratch.data() + j * d, out.data() + a * d, d);
    }
  }
}

SymMatrix covariance_from_indices(const DesignDistribution& design,
                                  std::span<const std::size_t> idx) {
  const std::size_t d = design.dim();
  std::vector<std::size_t> counts(design.atoms().size(), 0);
  for (std::size_t i : idx) ++counts[i];
  std::vector<double> acc(d * d, 0.0);
  const double inv_n = 1.0 / static_cast<double>(idx.size());
  for (std::size_t a = 0; a < counts.size(); ++a) {
    if (counts[a] == 0) continue;
    simd::active().syr(static_cast<double>(counts[a]) * inv_n, design.atoms()[a].x.data(),
                       acc.data(), d);
  }
  return SymMatrix(d, std::move(acc));
}

// Per-trial scalars for every lambda, plus optional matrix means.
struct Collected {
  // [lambda][trial]
  std::vector<std::vector<double>> trace_resolvent;
  std::vector<std::vector<double>> bias;
  std::vector<std::vector<double>> smoothed_trace;
  // [lambda], reduced over blocks in order
  std::vector<MatrixMeanAccumulator> sandwich;
};

Collected collect(const ExperimentConfig& cfg, bool with_matrices) {
  cfg.validate();
  const Problem& p = cfg.problem;
  const std::size_t d = p.dim();
  const std::size_t nl = cfg.lambda_grid.size();
  Collected out;
  out.trace_resolvent.assign(nl, std::vector<double>(cfg.trials));
  out.bias.assign(nl, std::vector<double>(cfg.trials));
  out.smoothed_trace.assign(nl, std::vector<double>(cfg.trials));

  const std::size_t blocks = trial_block_count(cfg.trials);
  std::vector<std::vector<MatrixMeanAccumulator>> block_acc;
  if (with_matrices) {
    block_acc.assign(blocks, std::vector<MatrixMeanAccumulator>(nl, MatrixMeanAccumulator(d)));
  }

  // Force the shared eigendecomposition before threads start.
  (void)p.design.covariance().eigen();

  run_trial_blocks(cfg.trials, cfg.jobs, [&](std::size_t trial, std::size_t block) {
    const auto idx = sample_design_indices(p.design, cfg.n, derive_seed(cfg.base_seed, trial));
    const SymMatrix sigma_hat = covariance_from_indices(p.design, idx);
    const TrialGeometry geo = make_geometry(sigma_hat, p.design.covariance(), p.theta_star);
    std::vector<double> rc;
    std::vector<double> mat;
    std::vector<double> scratch;
    for (std::size_t l = 0; l < nl; ++l) {
      const LambdaTerms t = lambda_terms(geo, cfg.lambda_grid[l], rc);
      out.trace_resolvent[l][trial] = t.trace_resolvent;
      out.bias[l][trial] = t.bias;
      out.smoothed_trace[l][trial] = t.smoothed_trace;
      if (with_matrices) {
        sandwich_matrix(geo, cfg.lambda_grid[l], mat, scratch);
        block_acc[block][l].add(mat);
      }
    }
  });

  if (with_matrices) {
    out.sandwich.assign(nl, MatrixMeanAccumulator(d));
    for (std::size_t b = 0; b < blocks; ++b) {
      for (std::size_t l = 0; l < nl; ++l) out.sandwich[l].merge(block_acc[b][l]);
    }
  }
  return out;
}

double noise_scale(const ExperimentConfig& cfg) {
  return cfg.problem.sigma * cfg.problem.sigma / static_cast<double>(cfg.n);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (trials < 2) throw std::invalid_argument("experiment: trials must be >= 2");
  if (n == 0) throw std::invalid_argument("experiment: n must be >= 1");
  if (lambda_grid.empty()) throw std::invalid_argument("experiment: empty lambda grid");
  for (double l : lambda_grid) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw std::invalid_argument("experiment: lambda values must be positive and finite");
    }
  }
  if (!(se_multiplier >= 0.0)) throw std::invalid_argument("experiment: se multiplier must be >= 0");
  problem.validate();
}

BoundReport make_report(std::string name, double lhs, double stderr_, double rhs, double k,
                        std::size_t trials, double lambda, std::size_t n) {
  BoundReport r;
  r.name = std::move(name);
  r.lhs_estimate = lhs;
  r.lhs_stderr = stderr_;
  r.rhs_value = rhs;
  r.margin = rhs - lhs;
  r.pass = lhs <= rhs + k * stderr_;
  r.trials = trials;
  r.lambda = lambda;
  r.n = n;
  return r;
}

MeanStderr mc_mean_and_stderr(std::span<const double> samples) {
  if (samples.size() < 2) {
    throw std::invalid_argument("mc_mean_and_stderr: need at least two samples");
  }
  const double count = static_cast<double>(samples.size());
  double sum = 0.0;
  for (double x : samples) sum += x;
  const double mean = sum / count;
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (count - 1.0));
  return {mean, sd / std::sqrt(count)};
}

MatrixMeanAccumulator::MatrixMeanAccumulator(std::size_t dim)
    : dim_(dim), sum_(dim * dim, 0.0) {}

void MatrixMeanAccumulator::add(std::span<const double> entries) {
  if (entries.size() != sum_.size()) {
    throw std::invalid_argument("MatrixMeanAccumulator: dimension mismatch");
  }
  simd::active().axpy(1.0, entries.data(), sum_.data(), sum_.size());
  sum_sq_frobenius_ += simd::active().dot(entries.data(), entries.data(), entries.size());
  ++count_;
}

void MatrixMeanAccumulator::merge(const MatrixMeanAccumulator& other) {
  if (other.dim_ != dim_) throw std::invalid_argument("MatrixMeanAccumulator: dimension mismatch");
  simd::active().axpy(1.0, other.sum_.data(), sum_.data(), sum_.size());
  sum_sq_frobenius_ += other.sum_sq_frobenius_;
  count_ += other.count_;
}

SymMatrix MatrixMeanAccumulator::mean() const {
  if (count_ == 0) throw std::logic_error("MatrixMeanAccumulator: mean of nothing");
  std::vector<double> m(sum_);
  simd::active().scale(1.0 / static_cast<double>(count_), m.data(), m.size());
  return SymMatrix(dim_, std::move(m));
}

double MatrixMeanAccumulator::frobenius_stderr() const {
  if (count_ < 2) return 0.0;
  const double c = static_cast<double>(count_);
  const double mean_sq = simd::active().dot(sum_.data(), sum_.data(), sum_.size()) / (c * c);
  const double total_var = std::max(0.0, (sum_sq_frobenius_ - c * mean_sq) / (c - 1.0));
  return std::sqrt(total_var / c);
}

void run_trial_blocks(std::size_t trials, unsigned jobs,
                      const std::function<void(std::size_t, std::size_t)>& body) {
  const std::size_t blocks = trial_block_count(trials);
  auto run_block = [&](std::size_t b) {
    const std::size_t lo = b * kTrialBlock;
    const std::size_t hi = std::min(trials, lo + kTrialBlock);
    for (std::size_t t = lo; t < hi; ++t) body(t, b);
  };
  const std::size_t workers = std::min<std::size_t>(std::max(1u, jobs), blocks);
  if (workers <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) run_block(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t b = next.fetch_add(1);
        if (b >= blocks) return;
        try {
          run_block(b);
        } catch (...) {
          const std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next.store(blocks);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

void enumerate_design_expectation(const DesignDistribution& design, std::size_t n,
                                  const std::function<void(const SymMatrix&, double)>& fn,
                                  std::size_t max_terms) {
  if (n == 0) throw std::invalid_argument("enumerate_design_expectation: n must be >= 1");
  const std::size_t m = design.atoms().size();
  // Number of compositions C(n + m - 1, m - 1), checked without overflow.
  double terms = 1.0;
  for (std::size_t i = 1; i < m; ++i) {
    terms *= static_cast<double>(n + i) / static_cast<double>(i);
  }
  if (terms > static_cast<double>(max_terms)) {
    throw std::invalid_argument("enumerate_design_expectation: too many sample compositions");
  }
  const std::size_t d = design.dim();
  std::vector<std::size_t> counts(m, 0);
  const double log_nfact = std::lgamma(static_cast<double>(n) + 1.0);

  auto visit = [&] {
    double logp = log_nfact;
    std::vector<double> acc(d * d, 0.0);
    for (std::size_t a = 0; a < m; ++a) {
      if (counts[a] == 0) continue;
      const double pa = design.atoms()[a].probability;
      if (pa == 0.0) return;
      const double ca = static_cast<double>(counts[a]);
      logp += ca * std::log(pa) - std::lgamma(ca + 1.0);
      simd::active().syr(ca / static_cast<double>(n), design.atoms()[a].x.data(), acc.data(), d);
    }
    fn(SymMatrix(d, std::move(acc)), std::exp(logp));
  };

  // Iterate compositions of n into m parts in lexicographic order.
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t atom, std::size_t left) {
    if (atom + 1 == m) {
      counts[atom] = left;
      visit();
      return;
    }
    for (std::size_t c = left + 1; c-- > 0;) {
      counts[atom] = c;
      rec(atom + 1, left - c);
    }
  };
  rec(0, n);
}

double conditional_excess_risk(const Dataset& data, const Problem& problem, double lambda) {
  if (!(lambda > 0.0)) throw std::domain_error("conditional_excess_risk: lambda must be positive");
  const SymMatrix& sigma = problem.design.covariance();
  const SymMatrix sigma_hat = empirical_covariance(data);
  const auto inv = [lambda](double mu) { return 1.0 / (std::max(mu, 0.0) + lambda); };
  const Vector w = spectral_apply(sigma_hat, inv, problem.theta_star);
  double out = lambda * lambda * quad_form(sigma, w);
  const double nn = static_cast<double>(data.n());
  double noise = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    noise += quad_form(sigma, spectral_apply(sigma_hat, inv, data.x(i)));
  }
  out += problem.sigma * problem.sigma / (nn * nn) * noise;
  return out;
}

std::vector<BoundReport> verify_lemma1(const ExperimentConfig& cfg) {
  const Collected col = collect(cfg, false);
  const double ns = noise_scale(cfg);
  std::vector<BoundReport> out;
  for (std::size_t l = 0; l < cfg.lambda_grid.size(); ++l) {
    std::vector<double> lhs(cfg.trials);
    std::vector<double> rhs(cfg.trials);
    std::vector<double> diff(cfg.trials);
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      lhs[t] = col.bias[l][t] + ns * col.smoothed_trace[l][t];
      rhs[t] = col.bias[l][t] + ns * col.trace_resolvent[l][t];
      diff[t] = lhs[t] - rhs[t];
    }
    const MeanStderr ml = mc_mean_and_stderr(lhs);
    const MeanStderr mr = mc_mean_and_stderr(rhs);
    const MeanStderr md = mc_mean_and_stderr(diff);
    out.push_back(make_report("lemma1", ml.mean, md.stderr_, mr.mean, cfg.se_multiplier,
                              cfg.trials, cfg.lambda_grid[l], cfg.n));
  }
  return out;
}

std::vector<BoundReport> verify_lemma2(const ExperimentConfig& cfg) {
  const Collected col = collect(cfg, false);
  const SymMatrix& sigma = cfg.problem.design.covariance();
  const double radius = cfg.problem.design.radius();
  std::vector<BoundReport> out;
  for (std::size_t l = 0; l < cfg.lambda_grid.size(); ++l) {
    const double lambda = cfg.lambda_grid[l];
    const double dl = effective_dimension(sigma, lambda);
    const MeanStderr m = mc_mean_and_stderr(col.trace_resolvent[l]);
    out.push_back(make_report("lemma2.lower", dl, m.stderr_, m.mean, cfg.se_multiplier,
                              cfg.trials, lambda, cfg.n));
    out.push_back(make_report("lemma2.upper", m.mean, m.stderr_,
                              inflation(radius, lambda, cfg.n) * dl, cfg.se_multiplier,
                              cfg.trials, lambda, cfg.n));
  }
  return out;
}

namespace {

SymMatrix lemma3_rhs(const SymMatrix& sigma, double lambda, double radius, std::size_t n) {
  const double f = inflation(radius, lambda, n);
  const double scale = f * f / lambda;
  return spectral_map(sigma, [=](double mu) {
    const double m = std::max(mu, 0.0);
    return scale * m / (m + lambda);
  });
}

}  // namespace

std::vector<BoundReport> verify_lemma3(const ExperimentConfig& cfg) {
  const Collected col = collect(cfg, true);
  const SymMatrix& sigma = cfg.problem.design.covariance();
  const double radius = cfg.problem.design.radius();
  std::vector<BoundReport> out;
  for (std::size_t l = 0; l < cfg.lambda_grid.size(); ++l) {
    const double lambda = cfg.lambda_grid[l];
    const SymMatrix gap = col.sandwich[l].mean() - lemma3_rhs(sigma, lambda, radius, cfg.n);
    const double top = gap.eigen().values.back();
    out.push_back(make_report("lemma3", top, col.sandwich[l].frobenius_stderr(), 0.0,
                              cfg.se_multiplier, cfg.trials, lambda, cfg.n));
  }
  return out;
}

std::vector<BoundReport> verify_theorem1(const ExperimentConfig& cfg) {
  const Collected col = collect(cfg, false);
  const Problem& p = cfg.problem;
  const double ns = noise_scale(cfg);
  std::vector<BoundReport> out;
  for (std::size_t l = 0; l < cfg.lambda_grid.size(); ++l) {
    const double lambda = cfg.lambda_grid[l];
    std::vector<double> risk(cfg.trials);
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      risk[t] = col.bias[l][t] + ns * col.smoothed_trace[l][t];
    }
    const MeanStderr m = mc_mean_and_stderr(risk);
    const Theorem1Bound b = theorem1_bound(p.design.covariance(), p.theta_star, lambda, cfg.n,
                                           p.design.radius(), p.sigma);
    out.push_back(make_report("theorem1", m.mean, m.stderr_, b.total, cfg.se_multiplier,
                              cfg.trials, lambda, cfg.n));
  }
  return out;
}

std::vector<BoundReport> verify_lemma2_exact(const Problem& problem, std::size_t n,
                                             std::span<const double> lambdas) {
  problem.validate();
  const SymMatrix& sigma = problem.design.covariance();
  std::vector<double> expect(lambdas.size(), 0.0);
  enumerate_design_expectation(problem.design, n, [&](const SymMatrix& sh, double prob) {
    const TrialGeometry geo = make_geometry(sh, sigma, problem.theta_star);
    std::vector<double> rc;
    for (std::size_t l = 0; l < lambdas.size(); ++l) {
      expect[l] += prob * lambda_terms(geo, lambdas[l], rc).trace_resolvent;
    }
  });
  std::vector<BoundReport> out;
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    const double dl = effective_dimension(sigma, lambdas[l]);
    out.push_back(make_report("lemma2.lower.exact", dl, 0.0, expect[l], 0.0, 0, lambdas[l], n));
    out.push_back(make_report("lemma2.upper.exact", expect[l], 0.0,
                              inflation(problem.design.radius(), lambdas[l], n) * dl, 0.0, 0,
                              lambdas[l], n));
  }
  return out;
}

std::vector<BoundReport> verify_lemma3_exact(const Problem& problem, std::size_t n,
                                             std::span<const double> lambdas) {
  problem.validate();
  const SymMatrix& sigma = problem.design.covariance();
  const std::size_t d = problem.dim();
  std::vector<std::vector<double>> expect(lambdas.size(), std::vector<double>(d * d, 0.0));
  enumerate_design_expectation(problem.design, n, [&](const SymMatrix& sh, double prob) {
    const TrialGeometry geo = make_geometry(sh, sigma, problem.theta_star);
    std::vector<double> mat;
    std::vector<double> scratch;
    for (std::size_t l = 0; l < lambdas.size(); ++l) {
      sandwich_matrix(geo, lambdas[l], mat, scratch);
      simd::active().axpy(prob, mat.data(), expect[l].data(), d * d);
    }
  });
  std::vector<BoundReport> out;
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    const SymMatrix gap = SymMatrix(d, expect[l]) -
                          lemma3_rhs(sigma, lambdas[l], problem.design.radius(), n);
    out.push_back(make_report("lemma3.exact", gap.eigen().values.back(), 0.0, 0.0, 0.0, 0,
                              lambdas[l], n));
  }
  return out;
}

SymMatrix random_spd(std::size_t d, Rng& rng, double floor) {
  std::vector<double> a(d * d);
  for (double& x : a) x = rng.normal();
  std::vector<double> s(d * d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    // Column j of A as a strided vector.
    Vector col(d);
    for (std::size_t i = 0; i < d; ++i) col[i] = a[i * d + j];
    simd::active().syr(1.0 / static_cast<double>(d), col.data(), s.data(), d);
  }
  for (std::size_t i = 0; i < d; ++i) s[i * d + i] += floor;
  return SymMatrix(d, std::move(s));
}

SymMatrix random_psd(std::size_t d, std::size_t rank, Rng& rng) {
  std::vector<double> s(d * d, 0.0);
  for (std::size_t k = 0; k < rank; ++k) {
    const Vector col = random_normal_vector(d, rng);
    simd::active().syr(1.0, col.data(), s.data(), d);
  }
  return SymMatrix(d, std::move(s));
}

std::vector<double> random_orthonormal_rows(std::size_t d, Rng& rng) {
  std::vector<double> q(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (;;) {
      double* row = q.data() + i * d;
      for (std::size_t j = 0; j < d; ++j) row[j] = rng.normal();
      // Two passes of modified Gram-Schmidt.
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t k = 0; k < i; ++k) {
          const double* prev = q.data() + k * d;
          simd::active().axpy(-simd::active().dot(prev, row, d), prev, row, d);
        }
      }
      const double nr = std::sqrt(simd::active().dot(row, row, d));
      if (nr > 1e-8) {
        simd::active().scale(1.0 / nr, row, d);
        break;
      }
    }
  }
  return q;
}

Vector random_normal_vector(std::size_t d, Rng& rng) {
  Vector v(d);
  for (double& x : v) x = rng.normal();
  return v;
}

std::vector<BoundReport> verify_lemma4_identity(const ExperimentConfig& cfg) {
  cfg.validate();
  const Problem& p = cfg.problem;
  const SymMatrix& sigma = p.design.covariance();
  const std::size_t d = p.dim();
  const std::size_t candidates = std::min<std::size_t>(cfg.trials, 1000);
  const double theta_sq = simd::dot(p.theta_star, p.theta_star);
  std::vector<BoundReport> out;
  for (std::size_t l = 0; l < cfg.lambda_grid.size(); ++l) {
    const double lambda = cfg.lambda_grid[l];
    const double bf = bias_functional(sigma, lambda, p.theta_star);
    const Vector theta_l = regularized_minimizer(sigma, lambda, p.theta_star);
    const double gap = regularized_gap(sigma, lambda, theta_l, p.theta_star);
    const double tol = 1e-10 * (1.0 + theta_sq * (op_norm(sigma) + lambda));
    out.push_back(make_report("lemma4-identity", std::abs(bf - gap), 0.0, tol, 0.0, 0, lambda,
                              cfg.n));

    Rng rng(derive_seed(cfg.base_seed, 0x4c454d4d41340000ULL + l));
    double best = std::numeric_limits<double>::infinity();
    const double spread = std::sqrt(theta_sq / static_cast<double>(d)) + 1e-3;
    for (std::size_t c = 0; c < candidates; ++c) {
      const double step = spread * std::pow(10.0, -3.0 * rng.uniform());
      Vector theta = theta_l;
      for (double& v : theta) v += step * rng.normal();
      best = std::min(best, regularized_gap(sigma, lambda, theta, p.theta_star));
    }
    out.push_back(make_report("lemma4-identity.minimum", bf, 0.0, best + tol, 0.0, candidates,
                              lambda, cfg.n));
  }
  return out;
}

std::vector<BoundReport> verify_lemma5_convexity(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t d = cfg.problem.dim();
  Rng rng(derive_seed(cfg.base_seed, 0x4c454d4d41350000ULL));
  double worst = -std::numeric_limits<double>::infinity();
  double worst_equal = 0.0;
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const SymMatrix a = random_spd(d, rng);
    const SymMatrix b = random_spd(d, rng);
    const std::size_t rank = 1 + static_cast<std::size_t>(rng.uniform() * static_cast<double>(d));
    const SymMatrix s = random_psd(d, std::min(rank, d), rng);
    const ConvexityCheck c = trace_inverse_convexity_check(a, b, s);
    worst = std::max(worst, (c.lhs - c.rhs) / (1.0 + std::abs(c.rhs)));
    const ConvexityCheck e = trace_inverse_convexity_check(a, a, s);
    worst_equal = std::max(worst_equal, std::abs(e.lhs - e.rhs) / (1.0 + std::abs(e.rhs)));
  }
  return {
      make_report("lemma5-convexity", worst, 0.0, 1e-10, 0.0, cfg.trials, 0.0, 0),
      make_report("lemma5-convexity.equality", worst_equal, 0.0, 1e-10, 0.0, cfg.trials, 0.0, 0),
  };
}

std::vector<BoundReport> verify_lemma6_identity(const ExperimentConfig& cfg) {
  cfg.validate();
  Rng rng(derive_seed(cfg.base_seed, 0x4c454d4d41360000ULL));
  double worst = 0.0;
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const std::size_t d = 2 + t % 7;
    const SymMatrix s = random_spd(d, rng);
    const Vector v = random_normal_vector(d, rng);
    const ShermanMorrisonResult r = sherman_morrison_apply(s, v);
    Vector resid = r.s_inv_v;
    simd::axpy(-r.factor, r.w, resid);
    const double scale = norm(r.s_inv_v);
    if (scale > 0.0) worst = std::max(worst, norm(resid) / scale);
  }
  return {make_report("lemma6-identity", worst, 0.0, 1e-10, 0.0, cfg.trials, 0.0, 0)};
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("loglog_slope: need two or more paired points");
  }
  const double m = static_cast<double>(x.size());
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += std::log(x[i]);
    sy += std::log(y[i]);
  }
  const double mx = sx / m;
  const double my = sy / m;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

namespace {

SlopeFit fit_interior(const std::string& quantity, const std::vector<double>& x,
                      const std::vector<double>& y, double expected, double tol) {
  const std::span<const double> xi(x.data() + 1, x.size() - 2);
  const std::span<const double> yi(y.data() + 1, y.size() - 2);
  bool usable = true;
  for (double v : yi) usable = usable && v > 0.0 && std::isfinite(v);
  const double slope = usable ? loglog_slope(xi, yi) : kNaN;
  const bool checked = !std::isnan(expected);
  const bool pass = !checked || (std::isfinite(slope) && std::abs(slope - expected) <= tol);
  return {quantity, slope, expected, checked ? tol : kNaN, pass};
}

double mc_mean_risk(const ExperimentConfig& cfg, std::size_t l, const Collected& col) {
  const double ns = noise_scale(cfg);
  std::vector<double> risk(cfg.trials);
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    risk[t] = col.bias[l][t] + ns * col.smoothed_trace[l][t];
  }
  return mc_mean_and_stderr(risk).mean;
}

}  // namespace

SweepResult rate_sweep(const ExperimentConfig& cfg, const SweepSpec& sweep) {
  cfg.validate();
  if (sweep.values.size() < 4) throw std::invalid_argument("rate_sweep: need at least 4 values");
  for (std::size_t i = 0; i < sweep.values.size(); ++i) {
    const double v = sweep.values[i];
    if (!(v > 0.0) || !std::isfinite(v) || (i > 0 && !(v > sweep.values[i - 1]))) {
      throw std::invalid_argument("rate_sweep: values must be positive and increasing");
    }
  }
  const Problem& p = cfg.problem;
  const SymMatrix& sigma = p.design.covariance();
  SweepResult res;

  if (sweep.parameter == SweepParameter::kLambda) {
    ExperimentConfig mc = cfg;
    mc.lambda_grid = sweep.values;
    Collected col;
    if (sweep.monte_carlo) col = collect(mc, false);
    for (std::size_t l = 0; l < sweep.values.size(); ++l) {
      const double lambda = sweep.values[l];
      res.rows.push_back({lambda, effective_dimension(sigma, lambda),
                          bias_functional(sigma, lambda, p.theta_star),
                          population_bias(sigma, lambda, p.theta_star),
                          sweep.monte_carlo ? mc_mean_risk(mc, l, col) : kNaN,
                          theorem1_bound(sigma, p.theta_star, lambda, cfg.n, p.design.radius(),
                                         p.sigma)
                              .total});
    }
  } else {
    const double lambda = cfg.lambda_grid.front();
    for (double v : sweep.values) {
      if (v != std::floor(v)) throw std::invalid_argument("rate_sweep: n values must be integers");
      ExperimentConfig mc = cfg;
      mc.n = static_cast<std::size_t>(v);
      mc.lambda_grid = {lambda};
      double risk = kNaN;
      if (sweep.monte_carlo) risk = mc_mean_risk(mc, 0, collect(mc, false));
      res.rows.push_back({v, effective_dimension(sigma, lambda),
                          bias_functional(sigma, lambda, p.theta_star),
                          population_bias(sigma, lambda, p.theta_star), risk,
                          theorem1_bound(sigma, p.theta_star, lambda, mc.n, p.design.radius(),
                                         p.sigma)
                              .total});
    }
  }

  std::vector<double> x;
  std::vector<double> dl;
  std::vector<double> bf;
  std::vector<double> pb;
  std::vector<double> mc;
  std::vector<double> tot;
  for (const SweepRow& r : res.rows) {
    x.push_back(r.value);
    dl.push_back(r.d_lambda);
    bf.push_back(r.bias_functional);
    pb.push_back(r.population_bias);
    mc.push_back(r.mc_excess_risk);
    tot.push_back(r.theorem1_total);
  }
  if (sweep.parameter == SweepParameter::kLambda) {
    const double want_dl = p.spectrum ? -1.0 / p.spectrum->b : kNaN;
    res.fits.push_back(fit_interior("d_lambda", x, dl, want_dl, 0.1));
    const double want_bf = p.source ? std::min(p.source->r, 1.0) : kNaN;
    res.fits.push_back(fit_interior("bias_functional", x, bf, want_bf, 0.1));
    const double want_pb = (p.source && p.source->r > 1.0) ? std::min(p.source->r, 2.0) : kNaN;
    res.fits.push_back(fit_interior("population_bias", x, pb, want_pb, 0.2));
  }
  res.fits.push_back(fit_interior("theorem1_total", x, tot, kNaN, kNaN));
  if (sweep.monte_carlo) res.fits.push_back(fit_interior("mc_excess_risk", x, mc, kNaN, kNaN));
  return res;
}

namespace {

const SlopeFit& find_fit(const SweepResult& sweep, const std::string& q) {
  for (const SlopeFit& f : sweep.fits) {
    if (f.quantity == q) return f;
  }
  throw std::invalid_argument("rate check: sweep has no fit for " + q);
}

}  // namespace

std::vector<BoundReport> rate_dlambda_reports(const ExperimentConfig& cfg,
                                              const SweepResult& sweep) {
  const Problem& p = cfg.problem;
  if (!p.spectrum) throw std::invalid_argument("rate-dlambda: problem has no spectral decay b");
  const double b = p.spectrum->b;
  const double budget = spectrum_budget(p.design.covariance(), b);
  double worst = 0.0;
  for (const SweepRow& r : sweep.rows) {
    worst = std::max(worst, r.d_lambda / (2.0 * budget * std::pow(r.value, -1.0 / b)));
  }
  const SlopeFit& f = find_fit(sweep, "d_lambda");
  return {
      make_report("rate-dlambda.slope", std::abs(f.slope - f.expected), 0.0, f.tolerance, 0.0,
                  0, 0.0, cfg.n),
      make_report("rate-dlambda.envelope", worst, 0.0, 1.0, 0.0, 0, 0.0, cfg.n),
  };
}

std::vector<BoundReport> rate_bias_reports(const ExperimentConfig& cfg,
                                           const SweepResult& sweep) {
  const Problem& p = cfg.problem;
  if (!p.source) throw std::invalid_argument("rate-bias: problem has no source condition r");
  const SlopeFit& f = find_fit(sweep, "bias_functional");
  std::vector<BoundReport> out{make_report("rate-bias.slope", std::abs(f.slope - f.expected),
                                           0.0, f.tolerance, 0.0, 0, 0.0, cfg.n)};
  const SlopeFit& g = find_fit(sweep, "population_bias");
  if (!std::isnan(g.expected)) {
    out.push_back(make_report("rate-bias.population-slope", std::abs(g.slope - g.expected), 0.0,
                              g.tolerance, 0.0, 0, 0.0, cfg.n));
  }
  return out;
}

double finite_dimension_ratio(const Problem& problem, std::size_t n, double lambda) {
  const double r2 = problem.design.radius() * problem.design.radius();
  const double scale = (problem.sigma * problem.sigma * static_cast<double>(problem.dim()) +
                        r2 * simd::dot(problem.theta_star, problem.theta_star)) /
                       static_cast<double>(n);
  if (scale == 0.0) return 0.0;
  const Theorem1Bound b = theorem1_bound(problem.design.covariance(), problem.theta_star, lambda,
                                         n, problem.design.radius(), problem.sigma);
  return b.total / scale;
}

}  // namespace ridgelab
