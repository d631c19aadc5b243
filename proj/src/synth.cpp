#include "ridgelab/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ridgelab {

DesignDistribution::DesignDistribution(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw std::invalid_argument("design: no atoms");
  d_ = atoms_.front().x.size();
  if (d_ == 0) throw std::invalid_argument("design: zero-dimensional atoms");

  std::vector<double> acc(d_ * d_, 0.0);
  double total = 0.0;
  cumulative_.reserve(atoms_.size());
  for (const Atom& a : atoms_) {
    if (a.x.size() != d_) throw std::invalid_argument("design: atoms of mixed dimension");
    if (!(a.probability >= 0.0) || !std::isfinite(a.probability)) {
      throw std::invalid_argument("design: atom probability must be finite and >= 0");
    }
    for (double v : a.x) {
      if (!std::isfinite(v)) throw std::invalid_argument("design: non-finite atom");
    }
    simd::active().syr(a.probability, a.x.data(), acc.data(), d_);
    radius_ = std::max(radius_, norm(a.x));
    total += a.probability;
    cumulative_.push_back(total);
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("design: probabilities sum to " + std::to_string(total));
  }
  cumulative_.back() = 1.0;
  sigma_ = SymMatrix(d_, std::move(acc));
}

Vector DesignDistribution::mean() const {
  Vector m(d_, 0.0);
  for (const Atom& a : atoms_) simd::axpy(a.probability, a.x, m);
  return m;
}

std::size_t DesignDistribution::sample_index(Rng& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto idx = static_cast<std::size_t>(it - cumulative_.begin());
  return std::min(idx, atoms_.size() - 1);
}

void Problem::validate() const {
  if (theta_star.size() != design.dim()) {
    throw std::invalid_argument("problem: theta* has dimension " +
                                std::to_string(theta_star.size()) + ", design has " +
                                std::to_string(design.dim()));
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("problem: noise level sigma must be finite and >= 0");
  }
  if (source) {
    const double got = source_norm(design.covariance(), source->r, theta_star);
    if (std::abs(got - source->rho) > 1e-10 * std::max(1.0, source->rho)) {
      throw std::invalid_argument("problem: source norm " + std::to_string(got) +
                                  " differs from rho " + std::to_string(source->rho));
    }
  }
  if (spectrum) {
    const double got = spectrum_budget(design.covariance(), spectrum->b);
    if (got > spectrum->budget + 1e-10 * std::max(1.0, spectrum->budget)) {
      throw std::invalid_argument("problem: Tr(Sigma^{1/b}) = " + std::to_string(got) +
                                  " exceeds B = " + std::to_string(spectrum->budget));
    }
  }
}

DesignDistribution make_bounded_design(std::span<const double> spectrum,
                                       std::span<const double> basis) {
  const std::size_t d = spectrum.size();
  if (d == 0) throw std::invalid_argument("make_bounded_design: empty spectrum");
  if (!basis.empty() && basis.size() != d * d) {
    throw std::invalid_argument("make_bounded_design: basis must be d x d");
  }
  bool any_positive = false;
  for (std::size_t i = 0; i < d; ++i) {
    if (!(spectrum[i] >= 0.0) || !std::isfinite(spectrum[i])) {
      throw std::invalid_argument("make_bounded_design: spectrum entries must be finite and >= 0");
    }
    if (i > 0 && spectrum[i] > spectrum[i - 1]) {
      throw std::invalid_argument("make_bounded_design: spectrum must be nonincreasing");
    }
    any_positive = any_positive || spectrum[i] > 0.0;
  }
  if (!any_positive) throw std::invalid_argument("make_bounded_design: all-zero spectrum");

  const double p = 1.0 / (2.0 * static_cast<double>(d));
  std::vector<Atom> atoms;
  atoms.reserve(2 * d);
  for (std::size_t i = 0; i < d; ++i) {
    const double scale = std::sqrt(static_cast<double>(d) * spectrum[i]);
    Vector x(d, 0.0);
    if (basis.empty()) {
      x[i] = scale;
    } else {
      for (std::size_t j = 0; j < d; ++j) x[j] = scale * basis[i * d + j];
    }
    Vector neg(x);
    for (double& v : neg) v = -v;
    atoms.push_back({std::move(x), p});
    atoms.push_back({std::move(neg), p});
  }
  return DesignDistribution(std::move(atoms));
}

namespace {

double positive_threshold(const Eigensystem& e) {
  return 1e-12 * std::max(std::abs(e.values.back()), std::abs(e.values.front()));
}

}  // namespace

Vector make_source_target(const SymMatrix& sigma, double r, double rho,
                          SourceDirection direction) {
  if (!(r > 0.0)) throw std::domain_error("make_source_target: r must be positive");
  if (!(rho >= 0.0)) throw std::invalid_argument("make_source_target: rho must be >= 0");
  require_psd(sigma, "make_source_target");
  const Eigensystem& e = sigma.eigen();
  const std::size_t d = e.dim();
  const double cutoff = positive_threshold(e);
  if (d == 0 || !(e.values.back() > 0.0)) {
    throw std::domain_error("make_source_target: Sigma has no positive eigenvalue");
  }

  // theta* = c sum_k mu_k^{expo} weight_k u_k, so that
  // Sigma^{(1-r)/2} theta* = c sum_k mu_k^{expo + (1-r)/2} weight_k u_k.
  double expo = 0.5 * r;
  Vector weight(d, 0.0);
  switch (direction.kind) {
    case SourceDirection::Kind::kUniform:
      for (std::size_t k = 0; k < d; ++k) weight[k] = e.values[k] > cutoff ? 1.0 : 0.0;
      break;
    case SourceDirection::Kind::kLeading:
      weight[d - 1] = 1.0;
      break;
    case SourceDirection::Kind::kCritical:
      if (!(direction.decay_b > 1.0)) {
        throw std::domain_error("make_source_target: critical direction needs b > 1");
      }
      expo = 0.5 * (r - 1.0);
      for (std::size_t k = 0; k < d; ++k) {
        weight[k] = e.values[k] > cutoff ? std::pow(e.values[k], 0.5 / direction.decay_b) : 0.0;
      }
      break;
  }

  Vector theta(d, 0.0);
  double source_sq = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    if (weight[k] == 0.0) continue;
    const double mu = e.values[k];
    const double comp = std::pow(mu, expo) * weight[k];
    const double image = std::pow(mu, expo + 0.5 * (1.0 - r)) * weight[k];
    source_sq += image * image;
    simd::axpy(comp, e.vector(k), theta);
  }
  const double c = rho / std::sqrt(source_sq);
  for (double& v : theta) v *= c;
  return theta;
}

double source_norm(const SymMatrix& sigma, double r, std::span<const double> theta_star) {
  const double expo = 0.5 * (1.0 - r);
  const Eigensystem& e = sigma.eigen();
  const double cutoff = positive_threshold(e);
  double sq = 0.0;
  for (std::size_t k = 0; k < e.dim(); ++k) {
    const double c = simd::dot(e.vector(k), theta_star);
    const double mu = std::max(e.values[k], 0.0);
    double f = 0.0;
    if (mu > cutoff) {
      f = std::pow(mu, expo);
    } else if (expo == 0.0) {
      f = 1.0;
    } else if (expo < 0.0 && c != 0.0) {
      // Negative power of a null direction: the source condition fails.
      return INFINITY;
    }
    sq += f * f * c * c;
  }
  return std::sqrt(sq);
}

double spectrum_budget(const SymMatrix& sigma, double b) {
  if (!(b > 1.0)) throw std::domain_error("spectrum_budget: b must exceed 1");
  double total = 0.0;
  for (double mu : sigma.eigen().values) total += std::pow(std::max(mu, 0.0), 1.0 / b);
  return total;
}

std::vector<std::size_t> sample_design_indices(const DesignDistribution& design,
                                               std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample: n must be >= 1");
  Rng rng(seed);
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) {
    idx[i] = design.sample_index(rng);
    (void)rng.normal();
  }
  return idx;
}

Dataset sample_dataset(const Problem& problem, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_dataset: n must be >= 1");
  const std::size_t d = problem.dim();
  Rng rng(seed);
  std::vector<double> xs(n * d);
  Vector ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vector& x = problem.design.atoms()[problem.design.sample_index(rng)].x;
    std::copy(x.begin(), x.end(), xs.begin() + static_cast<std::ptrdiff_t>(i * d));
    ys[i] = simd::dot(problem.theta_star, x) + problem.sigma * rng.normal();
  }
  return Dataset(d, std::move(xs), std::move(ys), seed);
}

Vector polynomial_spectrum(std::size_t d, double b) {
  Vector mu(d);
  for (std::size_t i = 0; i < d; ++i) mu[i] = std::pow(static_cast<double>(i + 1), -b);
  return mu;
}

}  // namespace ridgelab
