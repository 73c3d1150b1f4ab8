#include <iostream>

#include "qgdiff/cli_io.hpp"

int main(int argc, char** argv) { return qgdiff::run_cli(argc, argv, std::cout, std::cerr); }
