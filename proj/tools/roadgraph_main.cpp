#include <iostream>

#include "roadgraph/cli.hpp"

int main(int argc, char** argv) { return roadgraph::runCli(argc, argv, std::cout, std::cerr); }
