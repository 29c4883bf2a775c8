#include <iostream>

#include "revstream/cli/commands.hpp"

int main(int argc, char** argv) { return revstream::cli::run(argc, argv, std::cout, std::cerr); }
