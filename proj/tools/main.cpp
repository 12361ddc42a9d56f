#include <iostream>

#include "ecoc_cli.hpp"

int main(int argc, char** argv) { return ecoc::cli::run(argc, argv, std::cout, std::cerr); }
