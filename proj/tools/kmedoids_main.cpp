#include "kmedoids/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return kmedoids::run_cli(argc, argv, std::cout, std::cerr); }
