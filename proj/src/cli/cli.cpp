#include "ridgelab/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <iostream>
#include <thread>

#include "ridgelab/config.hpp"
#include "ridgelab/csv.hpp"
#include "ridgelab/harness.hpp"

#ifndef RIDGELAB_VERSION
#define RIDGELAB_VERSION "0.0.0"
#endif

namespace ridgelab::cli {

namespace {

constexpr std::size_t kMinTrials = 100;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Overrides {
  std::string config = "demo";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::string> out;
  std::optional<double> se_mult;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "Config file, or a built-in name (demo, rates)");
  app->add_option("--seed", o.seed, "Base seed");
  app->add_option("--trials", o.trials, "Monte Carlo trials per check");
  app->add_option("--out", o.out, "CSV output path");
  app->add_option("--se-mult", o.se_mult, "Standard errors of slack")->check(CLI::NonNegativeNumber);
  app->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

RunConfig resolve(const Overrides& o) {
  RunConfig cfg = load_config(o.config);
  const bool config_seed = cfg.canonical.find("experiment.seed=") != std::string::npos;
  if (!config_seed) {
    if (const char* env = std::getenv("RIDGE_LAB_SEED"); env && *env) {
      try {
        std::size_t used = 0;
        cfg.seed = std::stoull(env, &used);
        if (env[used] != '\0') throw std::invalid_argument("trailing text");
      } catch (const std::exception&) {
        throw UsageError(std::string("RIDGE_LAB_SEED is not an unsigned integer: ") + env);
      }
    }
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.trials) cfg.trials = *o.trials;
  if (o.out) cfg.out = *o.out;
  if (o.se_mult) cfg.se_multiplier = *o.se_mult;
  if (cfg.trials < kMinTrials) {
    throw UsageError("trials must be at least " + std::to_string(kMinTrials) + " (got " +
                     std::to_string(cfg.trials) + ")");
  }
  return cfg;
}

ExperimentConfig experiment(const RunConfig& cfg, const Problem& p, std::size_t n, unsigned jobs) {
  ExperimentConfig e{p, n, lambda_grid_for(cfg, n, p.design.radius()), cfg.trials, cfg.seed,
                     cfg.se_multiplier, jobs};
  return e;
}

// Reports for one check; returns false when the check does not apply to
// the configured problem and `lenient` is set.
bool run_check(const std::string& name, const RunConfig& cfg, const Problem& p, unsigned jobs,
               bool lenient, std::vector<BoundReport>& reports, std::ostream& out) {
  using Verifier = std::vector<BoundReport> (*)(const ExperimentConfig&);
  Verifier per_n = nullptr;
  if (name == "lemma1") per_n = verify_lemma1;
  if (name == "lemma2") per_n = verify_lemma2;
  if (name == "lemma3") per_n = verify_lemma3;
  if (name == "theorem1") per_n = verify_theorem1;
  if (per_n) {
    for (std::size_t n : cfg.ns) {
      auto r = per_n(experiment(cfg, p, n, jobs));
      reports.insert(reports.end(), r.begin(), r.end());
    }
    return true;
  }
  Verifier once = nullptr;
  if (name == "lemma4-identity") once = verify_lemma4_identity;
  if (name == "lemma5-convexity") once = verify_lemma5_convexity;
  if (name == "lemma6-identity") once = verify_lemma6_identity;
  if (once) {
    auto r = once(experiment(cfg, p, cfg.ns.front(), jobs));
    reports.insert(reports.end(), r.begin(), r.end());
    return true;
  }

  // Rate checks run closed-form sweeps on the [sweep] problem size.
  const bool needs_source = name == "rate-bias";
  if (cfg.spectrum.kind != SpectrumSpec::Kind::kPolynomial || (needs_source && !cfg.r)) {
    const std::string why = name + " needs spectrum = poly:b" + (needs_source ? " and r" : "");
    if (lenient) {
      out << "skipped " << why << '\n';
      return false;
    }
    throw UsageError(why);
  }
  const Problem sweep_problem = build_problem(cfg, cfg.sweep_d);
  ExperimentConfig e = experiment(cfg, sweep_problem, cfg.ns.front(), jobs);
  const SweepResult sweep = rate_sweep(e, {SweepParameter::kLambda, cfg.sweep_values, false});
  auto r = name == "rate-dlambda" ? rate_dlambda_reports(e, sweep) : rate_bias_reports(e, sweep);
  reports.insert(reports.end(), r.begin(), r.end());
  return true;
}

std::string timestamp_utc() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_manifest(const std::string& csv_path, const std::string& command, const RunConfig& cfg,
                    const std::vector<BoundReport>& reports, const std::string& started) {
  nlohmann::json j;
  j["command"] = command;
  j["config_hash"] = hex64(fnv1a64(cfg.canonical));
  j["base_seed"] = cfg.seed;
  j["tool_version"] = RIDGELAB_VERSION;
  j["started_at"] = started;
  j["simd"] = std::string(simd::isa_name(simd::active().isa));
  j["reports"] = nlohmann::json::array();
  for (const BoundReport& r : reports) {
    j["reports"].push_back({{"name", r.name},
                            {"lambda", r.lambda},
                            {"n", r.n},
                            {"trials", r.trials},
                            {"lhs_estimate", r.lhs_estimate},
                            {"lhs_stderr", r.lhs_stderr},
                            {"rhs_value", r.rhs_value},
                            {"margin", r.margin},
                            {"pass", r.pass}});
  }
  write_file_atomic(csv_path + ".manifest.json", j.dump(2) + "\n");
}

void print_summary(const std::vector<BoundReport>& reports, std::uint64_t seed, std::ostream& out) {
  char line[200];
  std::snprintf(line, sizeof line, "%-28s %12s %6s %14s %14s %14s  %s\n", "check", "lambda", "n",
                "lhs", "rhs", "margin", "result");
  out << line;
  for (const BoundReport& r : reports) {
    std::snprintf(line, sizeof line, "%-28s %12.4g %6zu %14.6g %14.6g %14.6g  %s\n",
                  r.name.c_str(), r.lambda, r.n, r.lhs_estimate, r.rhs_value, r.margin,
                  r.pass ? "PASS" : "FAIL");
    out << line;
  }
  for (const BoundReport& r : reports) {
    if (!r.pass) {
      out << "failed: " << r.name << " at lambda=" << format_real(r.lambda) << " n=" << r.n
          << " seed=" << seed << '\n';
    }
  }
}

int verify(const std::vector<std::string>& checks, const std::string& command, const Overrides& o,
           std::ostream& out) {
  const std::string started = timestamp_utc();
  const RunConfig cfg = resolve(o);
  const Problem p = build_problem(cfg, cfg.d);
  const bool lenient = checks.size() > 1;
  std::vector<BoundReport> reports;
  for (const std::string& name : checks) run_check(name, cfg, p, o.jobs, lenient, reports, out);

  print_summary(reports, cfg.seed, out);
  if (std::find(checks.begin(), checks.end(), "theorem1") != checks.end()) {
    double c = 0.0;
    for (std::size_t n : cfg.ns) {
      const double r2 = p.design.radius() * p.design.radius();
      c = std::max(c, finite_dimension_ratio(p, n, r2 / static_cast<double>(n)));
    }
    out << "finite-dimension constant at lambda = R^2/n: C = " << format_real(c) << '\n';
  }
  if (!cfg.out.empty()) {
    write_file_atomic(cfg.out, reports_csv(reports));
    write_manifest(cfg.out, command, cfg, reports, started);
  }
  const bool ok = std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.pass; });
  out << (ok ? "all checks passed" : "some checks FAILED") << " (" << reports.size()
      << " reports)\n";
  return ok ? 0 : 1;
}

int sweep(const Overrides& o, const std::string& param, const std::string& values,
          const std::string& mc, std::ostream& out) {
  const RunConfig cfg = resolve(o);
  const Problem p = build_problem(cfg, cfg.d);
  SweepSpec spec;
  if (param == "lambda") {
    spec.parameter = SweepParameter::kLambda;
  } else if (param == "n") {
    spec.parameter = SweepParameter::kN;
  } else {
    throw UsageError("--param must be lambda or n");
  }
  try {
    spec.values = values.empty() ? cfg.sweep_values : parse_value_grid(values);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--values: ") + e.what());
  }
  spec.monte_carlo = mc == "on" || (mc == "auto" && cfg.d <= 50);
  const SweepResult res = rate_sweep(experiment(cfg, p, cfg.ns.front(), o.jobs), spec);
  const std::string csv = sweep_csv(res, param);
  if (cfg.out.empty()) {
    out << csv;
  } else {
    write_file_atomic(cfg.out, csv);
    for (const SlopeFit& f : res.fits) {
      out << "fit " << f.quantity << ": slope " << format_real(f.slope);
      if (!std::isnan(f.expected)) {
        out << " expected " << format_real(f.expected) << " +- " << format_real(f.tolerance)
            << (f.pass ? " PASS" : " FAIL");
      }
      out << '\n';
    }
  }
  const bool ok = std::all_of(res.fits.begin(), res.fits.end(), [](const auto& f) { return f.pass; });
  return ok ? 0 : 1;
}

}  // namespace

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{
      "lemma1",           "lemma2",          "lemma3",       "theorem1", "lemma4-identity",
      "lemma5-convexity", "lemma6-identity", "rate-dlambda", "rate-bias"};
  return names;
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ridge regression bound certification", "ridgelab"};
  app.set_version_flag("--version", RIDGELAB_VERSION);
  bool list_flag = false;
  app.add_flag("--list-checks", list_flag, "List the available checks");
  app.require_subcommand(0, 1);

  Overrides verify_opts;
  std::string check;
  auto* verify_cmd = app.add_subcommand("verify", "Certify one check, or all of them");
  verify_cmd->add_option("check", check, "Check name or 'all'")->required();
  add_common(verify_cmd, verify_opts);

  Overrides sweep_opts;
  std::string param = "lambda";
  std::string values;
  std::string mc = "auto";
  auto* sweep_cmd = app.add_subcommand("sweep", "Tabulate functionals along lambda or n");
  sweep_cmd->add_option("--param", param, "lambda or n");
  sweep_cmd->add_option("--values", values, "a:b:logK, a:b:linK or a comma list");
  sweep_cmd->add_option("--mc", mc, "Monte Carlo column: auto, on or off")
      ->check(CLI::IsMember({"auto", "on", "off"}));
  add_common(sweep_cmd, sweep_opts);

  auto* list_cmd = app.add_subcommand("list-checks", "List the available checks");

  Overrides demo_opts;
  auto* demo_cmd = app.add_subcommand("demo", "Run every check on the built-in demo config");
  add_common(demo_cmd, demo_opts);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (list_flag || list_cmd->parsed()) {
      for (const auto& name : check_names()) out << name << '\n';
      return 0;
    }
    if (verify_cmd->parsed()) {
      if (check == "all") return verify(check_names(), "verify all", verify_opts, out);
      const auto& names = check_names();
      if (std::find(names.begin(), names.end(), check) == names.end()) {
        throw UsageError("unknown check '" + check + "' (see --list-checks)");
      }
      return verify({check}, "verify " + check, verify_opts, out);
    }
    if (sweep_cmd->parsed()) return sweep(sweep_opts, param, values, mc, out);
    if (demo_cmd->parsed()) return verify(check_names(), "demo", demo_opts, out);
    out << app.help();
    return 2;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
  } catch (const std::domain_error& e) {
    err << "invalid input: " << e.what() << '\n';
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
  }
  return 2;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + (argc > 0 ? 1 : 0), argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace ridgelab::cli
