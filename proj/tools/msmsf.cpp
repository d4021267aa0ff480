#include <iostream>

#include "msmsf/cli.hpp"

int main(int argc, char** argv) { return msmsf::run_cli(argc, argv, std::cout, std::cerr); }
