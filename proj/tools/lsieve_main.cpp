#include <iostream>

#include "lsieve/cli.hpp"

int main(int argc, char** argv) { return lsieve::cli::main_entry(argc, argv, std::cout, std::cerr); }
