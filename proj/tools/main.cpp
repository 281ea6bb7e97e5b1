#include <iostream>
#include <string>
#include <vector>

#include "pitchstyle/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pitchstyle::cli::run(args, std::cout, std::cerr);
}
