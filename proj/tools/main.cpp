#include <iostream>

#include "superint/cli.hpp"

int main(int argc, char** argv) { return superint::run_cli(argc, argv, std::cout, std::cerr); }
