#include <iostream>

#include "hypercf/cli.hpp"

int main(int argc, char** argv) { return hypercf::cli::run(argc, argv, std::cout, std::cerr); }
