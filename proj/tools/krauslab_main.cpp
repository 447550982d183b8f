#include <iostream>
#include <string>
#include <vector>

#include "krauslab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return krauslab::cli::run(args, std::cout, std::cerr);
}
