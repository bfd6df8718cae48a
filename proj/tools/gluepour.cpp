#include <iostream>

#include "gluepour/cli.hpp"

int main(int argc, char** argv) {
  return gluepour::run_cli(argc, argv, std::cout, std::cerr);
}
