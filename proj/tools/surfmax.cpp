#include <iostream>

#include "surfmax/cli.hpp"

int main(int argc, char** argv) { return surfmax::run_cli(argc, argv, std::cout, std::cerr); }
