#include "ridgelab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace ridgelab {

namespace {

constexpr std::string_view kDemoConfig = R"(# Small smoke suite: d = 5, polynomial spectrum.
[problem]
d = 5
spectrum = poly:2
r = 0.5
rho = 1
direction = critical
sigma = 0.5

[experiment]
n = 10, 50, 200
lambdas = 0.001, 0.01, 0.1, 1, R2/n
trials = 2000
seed = 7

[sweep]
d = 400
values = 1e-4:1e-1:log8
)";

constexpr std::string_view kRatesConfig = R"(# Rate regimes for mu_i = i^-2.
[problem]
d = 400
spectrum = poly:2
r = 0.5
rho = 1
direction = critical
sigma = 0.5

[experiment]
n = 1000
lambdas = 1e-4, 1e-3, 1e-2, 1e-1
trials = 200
seed = 11

[sweep]
d = 400
values = 1e-4:1e-1:log8
)";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> to_real(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::uint64_t> to_u64(std::string_view s) {
  s = trim(s);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

class Parser {
 public:
  Parser(const std::string& source, std::size_t line) : source_(source), line_(line) {}

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(source_, line_, what); }

  double real(std::string_view v, const char* key) const {
    const auto x = to_real(v);
    if (!x) fail(std::string(key) + ": expected a number, got '" + std::string(v) + "'");
    return *x;
  }

  std::uint64_t u64(std::string_view v, const char* key) const {
    const auto x = to_u64(v);
    if (!x) fail(std::string(key) + ": expected a non-negative integer, got '" + std::string(v) + "'");
    return *x;
  }

  std::size_t positive(std::string_view v, const char* key) const {
    const std::uint64_t x = u64(v, key);
    if (x == 0) fail(std::string(key) + ": must be >= 1");
    return static_cast<std::size_t>(x);
  }

 private:
  const std::string& source_;
  std::size_t line_;
};

void apply(RunConfig& cfg, const std::string& section, const std::string& key,
           std::string_view value, const Parser& p) {
  if (section == "problem") {
    if (key == "d") {
      cfg.d = p.positive(value, "d");
    } else if (key == "spectrum") {
      if (value == "identity") {
        cfg.spectrum = {SpectrumSpec::Kind::kIdentity, 0.0, {}};
      } else if (value.starts_with("poly:")) {
        const double b = p.real(value.substr(5), "spectrum");
        if (!(b > 1.0)) p.fail("spectrum: poly:b needs b > 1");
        cfg.spectrum = {SpectrumSpec::Kind::kPolynomial, b, {}};
      } else {
        SpectrumSpec s{SpectrumSpec::Kind::kExplicit, 0.0, {}};
        for (auto item : split_list(value)) {
          const double mu = p.real(item, "spectrum");
          if (mu < 0.0) p.fail("spectrum: eigenvalues must be >= 0");
          s.values.push_back(mu);
        }
        cfg.spectrum = std::move(s);
      }
    } else if (key == "r") {
      const double r = p.real(value, "r");
      if (!(r > 0.0)) p.fail("r: must be positive");
      cfg.r = r;
    } else if (key == "rho") {
      cfg.rho = p.real(value, "rho");
      if (cfg.rho < 0.0) p.fail("rho: must be >= 0");
    } else if (key == "direction") {
      if (value == "uniform") {
        cfg.direction = SourceDirection::Kind::kUniform;
      } else if (value == "leading") {
        cfg.direction = SourceDirection::Kind::kLeading;
      } else if (value == "critical") {
        cfg.direction = SourceDirection::Kind::kCritical;
      } else {
        p.fail("direction: expected uniform, leading or critical");
      }
    } else if (key == "sigma") {
      cfg.sigma = p.real(value, "sigma");
      if (cfg.sigma < 0.0) p.fail("sigma: must be >= 0");
    } else {
      p.fail("unknown key '" + key + "' in [problem]");
    }
  } else if (section == "experiment") {
    if (key == "n") {
      cfg.ns.clear();
      for (auto item : split_list(value)) cfg.ns.push_back(p.positive(item, "n"));
    } else if (key == "lambdas") {
      cfg.lambdas.clear();
      cfg.lambda_r2_over_n = false;
      for (auto item : split_list(value)) {
        if (item == "R2/n") {
          cfg.lambda_r2_over_n = true;
          continue;
        }
        const double l = p.real(item, "lambdas");
        if (!(l > 0.0)) p.fail("lambdas: values must be positive");
        cfg.lambdas.push_back(l);
      }
      if (cfg.lambdas.empty() && !cfg.lambda_r2_over_n) p.fail("lambdas: empty list");
    } else if (key == "trials") {
      cfg.trials = p.positive(value, "trials");
    } else if (key == "seed") {
      cfg.seed = p.u64(value, "seed");
    } else if (key == "se_mult") {
      cfg.se_multiplier = p.real(value, "se_mult");
      if (cfg.se_multiplier < 0.0) p.fail("se_mult: must be >= 0");
    } else {
      p.fail("unknown key '" + key + "' in [experiment]");
    }
  } else if (section == "output") {
    if (key == "out") {
      cfg.out = std::string(value);
    } else {
      p.fail("unknown key '" + key + "' in [output]");
    }
  } else if (section == "sweep") {
    if (key == "d") {
      cfg.sweep_d = p.positive(value, "d");
    } else if (key == "values") {
      try {
        cfg.sweep_values = parse_value_grid(value);
      } catch (const std::invalid_argument& e) {
        p.fail(e.what());
      }
    } else {
      p.fail("unknown key '" + key + "' in [sweep]");
    }
  } else {
    p.fail("key outside of a section");
  }
}

}  // namespace

ConfigError::ConfigError(std::string source, std::size_t line, const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

RunConfig parse_config(std::string_view text, const std::string& source) {
  RunConfig cfg;
  cfg.sweep_values = parse_value_grid("1e-4:1e-1:log8");
  std::map<std::string, std::string> canon;
  std::map<std::string, std::size_t> key_line;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const Parser p(source, line_no);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') p.fail("unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section != "problem" && section != "experiment" && section != "output" &&
          section != "sweep") {
        p.fail("unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) p.fail("expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) p.fail("missing key before '='");
    if (value.empty()) p.fail("missing value for '" + key + "'");
    const std::string full = section + "." + key;
    if (canon.count(full)) p.fail("duplicate key '" + key + "'");
    apply(cfg, section, key, value, p);
    canon[full] = std::string(value);
    key_line[full] = line_no;
  }

  if (cfg.spectrum.kind == SpectrumSpec::Kind::kExplicit &&
      cfg.spectrum.values.size() != cfg.d) {
    if (canon.count("problem.d")) {
      throw ConfigError(source, key_line["problem.spectrum"], "spectrum lists " +
                                             std::to_string(cfg.spectrum.values.size()) +
                                             " eigenvalues but d = " + std::to_string(cfg.d));
    }
    cfg.d = cfg.spectrum.values.size();
  }
  for (const auto& [k, v] : canon) cfg.canonical += k + "=" + v + "\n";
  return cfg;
}

std::optional<std::string> builtin_config_text(std::string_view name) {
  if (name == "demo") return std::string(kDemoConfig);
  if (name == "rates") return std::string(kRatesConfig);
  return std::nullopt;
}

RunConfig load_config(const std::string& path_or_name) {
  if (auto text = builtin_config_text(path_or_name)) return parse_config(*text, path_or_name);
  std::ifstream in(path_or_name, std::ios::binary);
  if (!in) throw ConfigError(path_or_name, 0, "cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path_or_name);
}

std::vector<double> parse_value_grid(std::string_view text) {
  text = trim(text);
  std::vector<double> out;
  if (text.find(':') == std::string_view::npos) {
    for (auto item : split_list(text)) {
      const auto v = to_real(item);
      if (!v) throw std::invalid_argument("bad value '" + std::string(item) + "'");
      out.push_back(*v);
    }
    return out;
  }
  const auto c1 = text.find(':');
  const auto c2 = text.find(':', c1 + 1);
  if (c2 == std::string_view::npos) {
    throw std::invalid_argument("grid must look like a:b:logK or a:b:linK");
  }
  const auto lo = to_real(text.substr(0, c1));
  const auto hi = to_real(text.substr(c1 + 1, c2 - c1 - 1));
  const std::string_view spec = trim(text.substr(c2 + 1));
  const bool log_scale = spec.starts_with("log");
  if (!lo || !hi || !(log_scale || spec.starts_with("lin"))) {
    throw std::invalid_argument("grid must look like a:b:logK or a:b:linK");
  }
  const auto count = to_u64(spec.substr(3));
  if (!count || *count < 2) throw std::invalid_argument("grid needs at least 2 points");
  if (log_scale && !(*lo > 0.0 && *hi > 0.0)) {
    throw std::invalid_argument("log grid needs positive endpoints");
  }
  const std::size_t k = static_cast<std::size_t>(*count);
  for (std::size_t i = 0; i < k; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(k - 1);
    out.push_back(log_scale ? std::exp(std::log(*lo) + t * (std::log(*hi) - std::log(*lo)))
                            : *lo + t * (*hi - *lo));
  }
  return out;
}

Problem build_problem(const RunConfig& cfg, std::size_t d) {
  Vector spectrum;
  std::optional<SpectrumParams> sp;
  switch (cfg.spectrum.kind) {
    case SpectrumSpec::Kind::kIdentity:
      spectrum.assign(d, 1.0);
      break;
    case SpectrumSpec::Kind::kPolynomial:
      spectrum = polynomial_spectrum(d, cfg.spectrum.b);
      break;
    case SpectrumSpec::Kind::kExplicit:
      if (cfg.spectrum.values.size() != d) {
        throw std::invalid_argument("explicit spectrum has " +
                                    std::to_string(cfg.spectrum.values.size()) +
                                    " values, problem needs " + std::to_string(d));
      }
      spectrum = cfg.spectrum.values;
      break;
  }
  DesignDistribution design = make_bounded_design(spectrum);
  if (cfg.spectrum.kind == SpectrumSpec::Kind::kPolynomial) {
    sp = SpectrumParams{cfg.spectrum.b, spectrum_budget(design.covariance(), cfg.spectrum.b)};
  }
  Vector theta(d, 0.0);
  std::optional<SourceParams> src;
  if (cfg.r) {
    SourceDirection dir{cfg.direction, cfg.spectrum.b};
    if (cfg.direction == SourceDirection::Kind::kCritical &&
        cfg.spectrum.kind != SpectrumSpec::Kind::kPolynomial) {
      throw std::invalid_argument("direction = critical needs spectrum = poly:b");
    }
    theta = make_source_target(design.covariance(), *cfg.r, cfg.rho, dir);
    src = SourceParams{*cfg.r, cfg.rho};
  }
  Problem p{std::move(design), std::move(theta), cfg.sigma, sp, src};
  p.validate();
  return p;
}

std::vector<double> lambda_grid_for(const RunConfig& cfg, std::size_t n, double radius) {
  std::vector<double> grid = cfg.lambdas;
  if (cfg.lambda_r2_over_n) grid.push_back(radius * radius / static_cast<double>(n));
  return grid;
}

std::uint64_t fnv1a64(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace ridgelab
