#include <iostream>

#include "qlpde/cli.hpp"

int main(int argc, char** argv) { return qlpde::cli_main(argc, argv, std::cout, std::cerr); }
