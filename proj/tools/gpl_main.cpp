#include <iostream>

#include "gpl/cli.hpp"

int main(int argc, char** argv) { return gpl::cli::run(argc, argv, std::cout, std::cerr); }
