#include "yy/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return yy::run_cli(argc, argv, std::cout, std::cerr); }
