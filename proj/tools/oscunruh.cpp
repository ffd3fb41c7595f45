#include <iostream>

#include "oscunruh/cli/app.hpp"

int main(int argc, char** argv) { return oscunruh::cli::run_cli(argc, argv, std::cout, std::cerr); }
