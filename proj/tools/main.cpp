#include <iostream>

#include "chtubes/cli.hpp"

int main(int argc, char** argv) { return chtubes::run_cli(argc, argv, std::cout, std::cerr); }
