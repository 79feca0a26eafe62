#include <iostream>
#include <string>
#include <vector>

#include "helion/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return helion::run(args, std::cout, std::cerr);
}
