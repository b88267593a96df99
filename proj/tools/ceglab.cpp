#include <cstdlib>
#include <iostream>

#include <unistd.h>

#include "ceglab/cli.hpp"

int main(int argc, char **argv) {
  const bool color = std::getenv("CEGLAB_NO_COLOR") == nullptr && isatty(STDERR_FILENO);
  return ceglab::cli::run(argc, argv, std::cout, std::cerr, color);
}
