#pragma once

// Command-line front end. Exit codes: 0 when every check passes, 1 when a
// bound fails, 2 on usage or configuration errors.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ridgelab::cli {

// Verifier names accepted by "verify", in run order.
const std::vector<std::string>& check_names();

// args excludes the program name.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace ridgelab::cli
