#pragma once

// CSV rendering of reports and sweep tables. Reals use 17 significant
// digits so every value round-trips.

#include <span>
#include <string>

#include "ridgelab/harness.hpp"

namespace ridgelab {

std::string format_real(double v);

// Header plus one row per report:
// name,lambda,n,trials,lhs_estimate,lhs_stderr,rhs_value,margin,pass
std::string reports_csv(std::span<const BoundReport> reports);

// Table rows, then one "fit:<quantity>" footer row per slope fit with
// columns slope, expected, tolerance, pass.
std::string sweep_csv(const SweepResult& sweep, const std::string& parameter);

// Writes to "<path>.tmp" and renames over `path`. Throws std::runtime_error.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace ridgelab
