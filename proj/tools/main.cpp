#include <iostream>
#include <string>
#include <vector>

#include "swdist/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return swdist::cli::run(args, std::cout, std::cerr);
}
