#include "tissue/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return tissue::run_cli(argc, argv, std::cout, std::cerr); }
