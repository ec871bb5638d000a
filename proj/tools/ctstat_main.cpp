#include <iostream>

#include "ctstat/cli.hpp"

int main(int argc, char** argv) { return ctstat::cli::main_entry(argc, argv, std::cout, std::cerr); }
