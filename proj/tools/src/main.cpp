#include <iostream>

#include "pcase/cli.hpp"

int main(int argc, char** argv) { return pcase::cli::run(argc, argv, std::cout, std::cerr); }
