#include <iostream>

#include "archsearch/cli.hpp"

int main(int argc, char** argv) { return archsearch::cli::run(argc, argv, std::cout, std::cerr); }
