#include <iostream>

#include "rbandit/cli.hpp"

int main(int argc, char** argv) { return rbandit::run_cli(argc, argv, std::cout, std::cerr); }
