#include <iostream>
#include <string>
#include <vector>

#include "commands.hpp"

int main(int argc, char* argv[]) {
  const std::vector<std::string> args(argv, argv + argc);
  return qrsdwt::cli::run(args, std::cout, std::cerr);
}
