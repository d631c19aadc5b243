#pragma once

// Experiment configuration: a flat "key = value" text format with
// [problem], [experiment], [output] and [sweep] sections. '#' starts a
// comment. Lists are comma separated.
//
//   [problem]
//   d = 5
//   spectrum = poly:2          # identity | poly:b | 1, 0.5, 0.25, ...
//   r = 0.5                    # optional source exponent; theta* = 0 without it
//   rho = 1
//   direction = critical       # uniform | leading | critical
//   sigma = 0.5
//   [experiment]
//   n = 10, 50, 200
//   lambdas = 0.001, 0.01, 0.1, 1, R2/n
//   trials = 2000
//   seed = 7
//   [output]
//   out = results.csv
//   [sweep]                    # problem size and grid for the rate checks
//   d = 400
//   values = 1e-4:1e-1:log8

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ridgelab/harness.hpp"
#include "ridgelab/synth.hpp"

namespace ridgelab {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string source, std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct SpectrumSpec {
  enum class Kind { kIdentity, kPolynomial, kExplicit };
  Kind kind = Kind::kIdentity;
  double b = 0.0;
  std::vector<double> values;  // kExplicit only
};

struct RunConfig {
  // [problem]
  std::size_t d = 5;
  SpectrumSpec spectrum;
  std::optional<double> r;
  double rho = 1.0;
  SourceDirection::Kind direction = SourceDirection::Kind::kUniform;
  double sigma = 1.0;
  // [experiment]
  std::vector<std::size_t> ns{10, 50, 200};
  std::vector<double> lambdas{1e-3, 1e-2, 1e-1, 1.0};
  bool lambda_r2_over_n = true;  // append R^2 / n to each grid
  std::size_t trials = 2000;
  std::uint64_t seed = 0;
  double se_multiplier = 3.0;
  // [output]
  std::string out;
  // [sweep]
  std::size_t sweep_d = 400;
  std::vector<double> sweep_values;

  // Sorted "section.key=value" lines; the input to the manifest hash.
  std::string canonical;
};

// Throws ConfigError with the 1-based line of the first problem.
RunConfig parse_config(std::string_view text, const std::string& source = "<config>");

// Built-in configs by name ("demo", "rates"), else the file at `path`.
RunConfig load_config(const std::string& path_or_name);
std::optional<std::string> builtin_config_text(std::string_view name);

// "a:b:logK" (K log-spaced points) or "a:b:linK" or a comma list.
// Throws std::invalid_argument on malformed text.
std::vector<double> parse_value_grid(std::string_view text);

Problem build_problem(const RunConfig& cfg, std::size_t d);
// Configured lambdas, plus R^2 / n when requested.
std::vector<double> lambda_grid_for(const RunConfig& cfg, std::size_t n, double radius);

std::uint64_t fnv1a64(std::string_view text) noexcept;

}  // namespace ridgelab
