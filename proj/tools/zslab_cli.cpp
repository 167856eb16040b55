#include <iostream>
#include <string>
#include <vector>

#include "zslab/cli_app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return zslab::cli::run(std::move(args), std::cout, std::cerr);
}
