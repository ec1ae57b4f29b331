#include <fstream>
#include <iostream>

#include "fixtures.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: gen_fixtures <fixtures-dir>\n";
    return 1;
  }
  const std::string dir = argv[1];
  std::ofstream(dir + "/sigvectors.json") << ags::fixtures::sigvectors().dump(2) << "\n";
  std::ofstream(dir + "/canonical_bytes.json") << ags::fixtures::canonical_dumps().dump(2) << "\n";
  return 0;
}
