#include <iostream>
#include <string>
#include <vector>

#include "ssd/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return ssd::cli::run(args, std::cout, std::cerr, ssd::cli::process_environment());
}
