#include <iostream>

#include "cadence/cli.hpp"

int main(int argc, char** argv) { return cadence::dispatch(argc, argv, std::cout, std::cerr); }
