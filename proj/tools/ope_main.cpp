#include <iostream>
#include <string>
#include <vector>

#include "ope/pipeline.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ope::pipeline::run_cli(args, std::cout, std::cerr);
}
