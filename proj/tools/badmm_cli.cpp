#include <iostream>

#include "badmm/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return badmm::run_cli(args, std::cout, std::cerr);
}
