#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dynsys {

/// Runs the dynsys command line. Exit codes: 0 pass/normal completion,
/// 1 fail verdict, 2 usage or parse error, 3 inconclusive under --strict.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace dynsys
