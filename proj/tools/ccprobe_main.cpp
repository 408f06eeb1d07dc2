#include <iostream>

#include "ccprobe/cli.hpp"

int main(int argc, char** argv) { return ccprobe::run_cli(argc, argv, std::cout, std::cerr); }
