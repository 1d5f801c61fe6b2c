#include <iostream>
#include <string>
#include <vector>

#include "uqalign/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return uqalign::cli::run(args, std::cout, std::cerr);
}
