#include <iostream>

#include "bor/cli.hpp"

int main(int argc, char** argv) { return bor::run_cli(argc, argv, std::cout, std::cerr); }
