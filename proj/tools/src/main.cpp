#include <iostream>
#include <string>
#include <vector>

#include "adn/cli/run.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return adn::cli::run_command(args, std::cout, std::cerr);
}
