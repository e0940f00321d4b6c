#include <iostream>

#include "sphbot/cli.hpp"

int main(int argc, char** argv) {
  return sphbot::run_cli(argc, argv, std::cout, std::cerr);
}
