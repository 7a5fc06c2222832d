#include <iostream>
#include <string>
#include <vector>

#include "furrow/app/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return furrow::app::run(args, std::cout, std::cerr);
}
