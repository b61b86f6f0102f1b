#include <iostream>
#include <string>
#include <vector>

#include "fgs_tools/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return fgs::tools::run_cli(args, std::cout, std::cerr);
}
