#include <iostream>

#include "sdae/cli.hpp"

int main(int argc, char** argv) {
  return sdae::run_cli(argc, argv, std::cout, std::cerr);
}
