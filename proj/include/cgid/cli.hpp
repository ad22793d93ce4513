#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cgid {

/// Runs the command-line tool. Exit status: 0 for a positive answer (true,
/// identifiable, witness found), 2 for a negative one, 1 for errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cgid
