#include <iostream>

#include "maxseq/cli.hpp"

int main(int argc, char** argv) { return maxseq::run(argc, argv, std::cout, std::cerr); }
