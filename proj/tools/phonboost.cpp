#include "phonboost/cli.hpp"

#include <iostream>

int main(int argc, char **argv) { return phonboost::run_cli(argc, argv, std::cout, std::cerr); }
