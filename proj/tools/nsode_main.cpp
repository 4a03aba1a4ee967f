#include <iostream>

#include "nsode/cli.hpp"

int main(int argc, char** argv) { return nsode::cli_main(argc, argv, std::cout, std::cerr); }
