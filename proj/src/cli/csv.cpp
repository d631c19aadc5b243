#include "ridgelab/csv.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace ridgelab {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string reports_csv(std::span<const BoundReport> reports) {
  std::string out = "name,lambda,n,trials,lhs_estimate,lhs_stderr,rhs_value,margin,pass\n";
  for (const BoundReport& r : reports) {
    out += r.name + ',' + format_real(r.lambda) + ',' + std::to_string(r.n) + ',' +
           std::to_string(r.trials) + ',' + format_real(r.lhs_estimate) + ',' +
           format_real(r.lhs_stderr) + ',' + format_real(r.rhs_value) + ',' +
           format_real(r.margin) + ',' + (r.pass ? "true" : "false") + '\n';
  }
  return out;
}

std::string sweep_csv(const SweepResult& sweep, const std::string& parameter) {
  std::string out = parameter +
                    ",d_lambda,bias_functional,population_bias,mc_excess_risk,theorem1_total\n";
  for (const SweepRow& r : sweep.rows) {
    out += format_real(r.value) + ',' + format_real(r.d_lambda) + ',' +
           format_real(r.bias_functional) + ',' + format_real(r.population_bias) + ',' +
           format_real(r.mc_excess_risk) + ',' + format_real(r.theorem1_total) + '\n';
  }
  for (const SlopeFit& f : sweep.fits) {
    out += "fit:" + f.quantity + ',' + format_real(f.slope) + ',' + format_real(f.expected) +
           ',' + format_real(f.tolerance) + ',' + (f.pass ? "true" : "false") + ",\n";
  }
  return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp);
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename " + tmp + " to " + path + ": " + ec.message());
  }
}

}  // namespace ridgelab
