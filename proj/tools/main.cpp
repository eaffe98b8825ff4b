#include <iostream>

#include "dilatox/cli.hpp"

int main(int argc, char** argv) { return dilatox::cli::run_cli(argc, argv, std::cout, std::cerr); }
