#include "splitpack/cli/app.hpp"

#include <unistd.h>

#include <iostream>

int main(int argc, char** argv) {
  return splitpack::cli::run(argc, argv, std::cin, std::cout, std::cerr,
                             isatty(STDIN_FILENO) && isatty(STDERR_FILENO));
}
