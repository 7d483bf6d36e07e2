#include <iostream>

#include "pqdsim/cli.hpp"

int main(int argc, char** argv) { return pqdsim::run_cli(argc, argv, std::cout, std::cerr); }
