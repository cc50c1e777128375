#include <iostream>

#include "spread/cli.hpp"

int main(int argc, char** argv) { return spread::run_cli(argc, argv, std::cout, std::cerr); }
