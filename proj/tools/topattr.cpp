#include <iostream>

#include "topattr/cli.hpp"

int main(int argc, char** argv) { return topattr::run_cli(argc, argv, std::cout, std::cerr); }
