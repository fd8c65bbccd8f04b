#include <iostream>
#include <string>
#include <vector>

#include "cqdd/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cqdd::run_cli(args, std::cout, std::cerr);
}
