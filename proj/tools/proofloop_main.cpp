#include <iostream>
#include <string>
#include <vector>

#include "proofloop/cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return proofloop::cli::run(args, std::cout, std::cerr);
}
