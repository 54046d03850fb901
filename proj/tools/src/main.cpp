#include <iostream>

#include "lincg_cli/cli.hpp"

int main(int argc, char** argv) {
  return lincg::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
