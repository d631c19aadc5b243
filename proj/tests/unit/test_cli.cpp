#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ridgelab/cli.hpp"
#include "ridgelab/config.hpp"
#include "ridgelab/csv.hpp"

namespace {

using namespace ridgelab;
namespace fs = std::filesystem;

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("ridgelab_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

TEST(ConfigParser, FullExample) {
  const RunConfig c = parse_config(R"(
[problem]
d = 4
spectrum = poly:2.5   # decay
r = 1.5
rho = 2
direction = leading
sigma = 0.25
[experiment]
n = 5, 15
lambdas = 0.5, R2/n
trials = 300
seed = 18446744073709551615
[output]
out = x.csv
[sweep]
d = 40
values = 0.1, 0.2, 0.3, 0.4
)");
  EXPECT_EQ(c.d, 4u);
  EXPECT_EQ(c.spectrum.kind, SpectrumSpec::Kind::kPolynomial);
  EXPECT_EQ(c.spectrum.b, 2.5);
  EXPECT_EQ(*c.r, 1.5);
  EXPECT_EQ(c.rho, 2.0);
  EXPECT_EQ(c.direction, SourceDirection::Kind::kLeading);
  EXPECT_EQ(c.sigma, 0.25);
  EXPECT_EQ(c.ns, (std::vector<std::size_t>{5, 15}));
  EXPECT_EQ(c.lambdas, (std::vector<double>{0.5}));
  EXPECT_TRUE(c.lambda_r2_over_n);
  EXPECT_EQ(c.trials, 300u);
  EXPECT_EQ(c.seed, 18446744073709551615ULL);
  EXPECT_EQ(c.out, "x.csv");
  EXPECT_EQ(c.sweep_d, 40u);
  EXPECT_EQ(c.sweep_values.size(), 4u);

  const Problem p = build_problem(c, c.d);
  EXPECT_EQ(p.dim(), 4u);
  const auto grid = lambda_grid_for(c, 15, p.design.radius());
  ASSERT_EQ(grid.size(), 2u);
  EXPECT_NEAR(grid[1], 4.0 / 15.0, 1e-15);
}

TEST(ConfigParser, ExplicitSpectrumSetsDimension) {
  const RunConfig c = parse_config("[problem]\nspectrum = 1, 0.5, 0.5\n");
  EXPECT_EQ(c.d, 3u);
  EXPECT_EQ(c.spectrum.kind, SpectrumSpec::Kind::kExplicit);
}

TEST(ConfigParser, LineNumberedErrors) {
  const std::pair<const char*, std::size_t> cases[] = {
      {"[problem]\nd = 3\nfoo = 1\n", 3},
      {"[problem]\n\nsigma = abc\n", 3},
      {"d = 3\n", 1},
      {"[nowhere]\n", 1},
      {"[problem]\nd = 0\n", 2},
      {"[experiment]\ntrials = 10\ntrials = 20\n", 3},
      {"[experiment]\nlambdas = 0.1, -1\n", 2},
      {"[problem\n", 1},
      {"[problem]\nd 3\n", 2},
      {"[problem]\nspectrum = poly:1\n", 2},
      {"[problem]\nd = 2\nspectrum = 1, 2, 3\n", 3},
  };
  for (const auto& [text, line] : cases) {
    try {
      parse_config(text, "t.cfg");
      ADD_FAILURE() << "accepted: " << text;
    } catch (const ConfigError& e) {
      EXPECT_EQ(e.line(), line) << text << " -> " << e.what();
      EXPECT_NE(std::string(e.what()).find("t.cfg:"), std::string::npos);
    }
  }
}

TEST(ConfigParser, CanonicalFormIgnoresLayout) {
  const RunConfig a = parse_config("[problem]\nd=3\nsigma = 1\n");
  const RunConfig b = parse_config("# c\n[problem]\n  sigma   =  1  \n\nd = 3 # x\n");
  EXPECT_EQ(a.canonical, b.canonical);
  EXPECT_EQ(fnv1a64(a.canonical), fnv1a64(b.canonical));
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(ValueGrid, Forms) {
  const auto g = parse_value_grid("1e-4:1e-1:log8");
  ASSERT_EQ(g.size(), 8u);
  EXPECT_NEAR(g.front(), 1e-4, 1e-18);
  EXPECT_NEAR(g.back(), 1e-1, 1e-15);
  EXPECT_NEAR(g[1] / g[0], g[7] / g[6], 1e-12);
  EXPECT_EQ(parse_value_grid("0:1:lin3"), (std::vector<double>{0.0, 0.5, 1.0}));
  EXPECT_EQ(parse_value_grid("10, 20,40"), (std::vector<double>{10, 20, 40}));
  EXPECT_THROW(parse_value_grid("1:2"), std::invalid_argument);
  EXPECT_THROW(parse_value_grid("0:1:log4"), std::invalid_argument);
  EXPECT_THROW(parse_value_grid("1:2:cube4"), std::invalid_argument);
  EXPECT_THROW(parse_value_grid("1,x"), std::invalid_argument);
}

TEST(Csv, RealFormattingRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 123456789.0}) {
    EXPECT_EQ(std::stod(format_real(v)), v);
  }
  EXPECT_EQ(format_real(NAN), "nan");
  EXPECT_EQ(format_real(-INFINITY), "-inf");
}

TEST(Csv, ReportColumns) {
  const BoundReport r = make_report("lemma2.upper", 1.5, 0.25, 2.0, 3.0, 100, 0.1, 50);
  const std::vector<BoundReport> rs{r};
  EXPECT_EQ(reports_csv(rs),
            "name,lambda,n,trials,lhs_estimate,lhs_stderr,rhs_value,margin,pass\n"
            "lemma2.upper,0.10000000000000001,50,100,1.5,0.25,2,0.5,true\n");
}

TEST(Cli, ListChecks) {
  const std::string want =
      "lemma1\nlemma2\nlemma3\ntheorem1\nlemma4-identity\nlemma5-convexity\nlemma6-identity\n"
      "rate-dlambda\nrate-bias\n";
  EXPECT_EQ(run_cli({"--list-checks"}).out, want);
  EXPECT_EQ(run_cli({"list-checks"}).out, want);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run_cli({"verify", "all", "--config", "demo", "--trials", "2"}).code, 2);
  EXPECT_EQ(run_cli({"verify", "lemma9"}).code, 2);
  EXPECT_EQ(run_cli({"verify", "lemma2", "--config", "/nonexistent/file.cfg"}).code, 2);
  EXPECT_EQ(run_cli({"verify"}).code, 2);
  EXPECT_EQ(run_cli({"bogus"}).code, 2);
  EXPECT_EQ(run_cli({"sweep", "--param", "mu"}).code, 2);
  EXPECT_EQ(run_cli({"sweep", "--values", "1:2"}).code, 2);
}

TEST(Cli, MalformedConfigReportsLine) {
  TempDir dir;
  const auto cfg = dir / "bad.cfg";
  std::ofstream(cfg) << "[problem]\nd = 5\nsigma = -1\n";
  const auto r = run_cli({"verify", "lemma2", "--config", cfg.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(":3:"), std::string::npos) << r.err;
}

TEST(Cli, VerifyWritesCsvAndManifest) {
  TempDir dir;
  const auto out = dir / "l2.csv";
  const auto r = run_cli({"verify", "lemma2", "--config", "demo", "--seed", "7", "--trials",
                          "1000", "--out", out.string(), "--jobs", "2"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  const std::string csv = slurp(out);
  std::size_t rows = 0;
  for (char c : csv) rows += c == '\n';
  EXPECT_EQ(rows, 1u + 2u * 5u * 3u);  // header + 2 sides x 5 lambdas x 3 n
  EXPECT_TRUE(csv.starts_with("name,lambda,n,trials,lhs_estimate"));
  const std::string manifest = slurp(out.string() + ".manifest.json");
  EXPECT_NE(manifest.find("\"config_hash\""), std::string::npos);
  EXPECT_NE(manifest.find("\"base_seed\": 7"), std::string::npos);
  EXPECT_FALSE(fs::exists(out.string() + ".tmp"));
}

TEST(Cli, SeedPrecedence) {
  TempDir dir;
  const auto cfg = dir / "noseed.cfg";
  std::ofstream(cfg) << "[problem]\nd = 3\n[experiment]\nn = 10\nlambdas = 0.1\ntrials = 200\n";
  const auto a = dir / "a.csv";
  const auto b = dir / "b.csv";
  const auto c = dir / "c.csv";
  ::setenv("RIDGE_LAB_SEED", "5", 1);
  EXPECT_EQ(run_cli({"verify", "lemma2", "--config", cfg.string(), "--out", a.string()}).code, 0);
  EXPECT_EQ(run_cli({"verify", "lemma2", "--config", cfg.string(), "--seed", "5", "--out",
                     b.string()})
                .code,
            0);
  EXPECT_EQ(run_cli({"verify", "lemma2", "--config", cfg.string(), "--seed", "6", "--out",
                     c.string()})
                .code,
            0);
  ::unsetenv("RIDGE_LAB_SEED");
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_NE(slurp(a), slurp(c));
}

TEST(Cli, FailedBoundExitsOne) {
  TempDir dir;
  const auto cfg = dir / "steep.cfg";
  // A 5-dimensional spectrum is far too short for the asymptotic d_lambda slope.
  std::ofstream(cfg) << "[problem]\nd = 5\nspectrum = poly:1.5\n[sweep]\nd = 5\n"
                        "values = 1e-4:1e-1:log8\n";
  const auto r = run_cli({"verify", "rate-dlambda", "--config", cfg.string()});
  EXPECT_EQ(r.code, 1) << r.out;
  EXPECT_NE(r.out.find("failed: rate-dlambda"), std::string::npos);
}

TEST(Cli, RateChecksNeedPolynomialSpectrum) {
  TempDir dir;
  const auto cfg = dir / "flat.cfg";
  std::ofstream(cfg) << "[problem]\nd = 3\nspectrum = identity\n";
  EXPECT_EQ(run_cli({"verify", "rate-dlambda", "--config", cfg.string()}).code, 2);
}

TEST(Cli, SweepTableAndFooter) {
  const auto r = run_cli({"sweep", "--param", "lambda", "--values", "1e-4:1e-1:log8", "--config",
                          "rates"});
  EXPECT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "lambda,d_lambda,bias_functional,population_bias,mc_excess_risk,theorem1_total");
  std::size_t rows = 0, fits = 0;
  while (std::getline(lines, line)) (line.starts_with("fit:") ? fits : rows)++;
  EXPECT_EQ(rows, 8u);
  EXPECT_GE(fits, 3u);
}

TEST(Cli, SampleSizeSweepOnDemo) {
  const auto r = run_cli({"sweep", "--param", "n", "--values", "10,20,40,80", "--config", "demo",
                          "--trials", "200"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("fit:mc_excess_risk"), std::string::npos);
}

}  // namespace
