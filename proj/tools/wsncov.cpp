#include <iostream>

#include "wsncov_cli.hpp"

int main(int argc, char** argv) { return wsncov::cli::run(argc, argv, std::cout, std::cerr); }
