#include <iostream>

#include "remctl/cli.hpp"

int main(int argc, char** argv) { return remctl::cli::run(argc, argv, std::cout, std::cerr); }
