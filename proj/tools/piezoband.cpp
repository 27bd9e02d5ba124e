#include <iostream>

#include "piezoband/cli_io.hpp"

int main(int argc, char** argv) { return piezoband::cli::run(argc, argv, std::cout, std::cerr); }
