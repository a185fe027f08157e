#include <iostream>

#include "jod/cli.hpp"

int main(int argc, char** argv) { return jod::cli::run(argc, argv, std::cout, std::cerr); }
