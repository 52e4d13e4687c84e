#include <iostream>

#include "kpartite/cli.hpp"

int main(int argc, char** argv) { return kpartite::run_cli(argc, argv, std::cout, std::cerr); }
