#include <iostream>

#include "precray/cli.hpp"

int main(int argc, char** argv) { return precray::cli::run(argc, argv, std::cout, std::cerr); }
