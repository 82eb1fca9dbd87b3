#include <iostream>

#include "night/cli.hpp"

int main(int argc, char** argv) { return night::cli::execute(argc, argv, std::cout, std::cerr); }
