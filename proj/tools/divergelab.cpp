#include <iostream>

#include "divergelab/cli.hpp"

int main(int argc, char** argv) { return divergelab::cli::run(argc, argv, std::cout, std::cerr); }
