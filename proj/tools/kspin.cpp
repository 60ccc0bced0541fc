#include <iostream>

#include "kspin/commands.hpp"

int main(int argc, char** argv) { return kspin::run_cli(argc, argv, std::cout, std::cerr); }
