#include <iostream>
#include <string>
#include <vector>

#include "stripid/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return stripid::cli::run(args, std::cout, std::cerr);
}
