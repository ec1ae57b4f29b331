#include <iostream>

#include "ags/cli/cli.hpp"

int main(int argc, char** argv) {
  return ags::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
