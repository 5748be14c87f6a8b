#include <iostream>

#include "acro/cli.hpp"

int main(int argc, char** argv) { return acro::cli::run(argc, argv, std::cout, std::cerr); }
