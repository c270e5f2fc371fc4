#include <iostream>

#include "urbanaq/cli.hpp"

int main(int argc, char** argv) { return urbanaq::cli::run(argc, argv, std::cout, std::cerr); }
