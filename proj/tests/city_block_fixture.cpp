// Writes the synthetic city block inputs and config.json into a directory.

#include <filesystem>
#include <iostream>

#include "support/synthetic.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: city_block_fixture <dir>\n";
    return 1;
  }
  std::filesystem::create_directories(argv[1]);
  std::cout << synthetic::write_city_block(argv[1]).string() << "\n";
  return 0;
}
