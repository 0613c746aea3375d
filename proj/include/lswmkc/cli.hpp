#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lswmkc {

// Entry point of the command-line tool; argv[0] is the program name.
// Returns the process exit code. Diagnostics go to `err`.
int run_command(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace lswmkc
