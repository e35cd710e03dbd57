#include <iostream>

#include "fitheight/cli.hpp"

int main(int argc, char** argv) { return fitheight::cli::main(argc, argv, std::cout, std::cerr); }
