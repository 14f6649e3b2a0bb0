#include <iostream>

#include "actflow/cli.hpp"

int main(int argc, char** argv) { return actflow::run_cli(argc, argv, std::cout, std::cerr); }
