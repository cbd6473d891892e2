#include <iostream>

#include "alg/cli.hpp"

int main(int argc, char** argv) {
  return alg::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
