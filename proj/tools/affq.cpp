#include <iostream>

#include "affq/cli.hpp"

int main(int argc, char** argv) { return affq::cli::run(argc, argv, std::cout, std::cerr); }
