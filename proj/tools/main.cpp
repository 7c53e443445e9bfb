#include <iostream>
#include <string>
#include <vector>

#include "sentipipe/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return sentipipe::run_cli(args, std::cout, std::cerr);
}
