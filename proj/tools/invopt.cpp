#include <iostream>

#include "invopt/cli.hpp"

int main(int argc, char** argv) {
  return invopt::run_cli(argc, argv, std::cout, std::cerr);
}
