#include <iostream>
#include <string>
#include <vector>

#include "ospe/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return ospe::cli::run(args, std::cout, std::cerr);
}
