#include <iostream>

#include "prefixseal/cli.hpp"

int main(int argc, char** argv) { return prefixseal::cli::run(argc, argv, std::cout, std::cerr); }
