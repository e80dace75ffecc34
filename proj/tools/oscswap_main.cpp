#include <iostream>

#include "oscswap/cli.hpp"

int main(int argc, char** argv) { return oscswap::cli::run(argc, argv, std::cout, std::cerr); }
