#include <iostream>

#include "needlets/cli.hpp"

int main(int argc, char** argv) { return needlets::cli::run(argc, argv, std::cout, std::cerr); }
