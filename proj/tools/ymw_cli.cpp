#include <iostream>

#include "ymw/cli.hpp"

int main(int argc, char** argv) { return ymw::run(argc, argv, std::cout, std::cerr); }
