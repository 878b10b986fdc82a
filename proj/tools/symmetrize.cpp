#include <iostream>

#include "symm/cli.hpp"

int main(int argc, char** argv) { return symm::cli::main(argc, argv, std::cout, std::cerr); }
