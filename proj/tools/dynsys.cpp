#include <iostream>
#include <string>
#include <vector>

#include "dynsys/cli_run.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dynsys::run_cli(std::move(args), std::cout, std::cerr);
}
