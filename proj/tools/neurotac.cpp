#include <neurotac/cli.hpp>

#include <iostream>

int main(int argc, char** argv) { return neurotac::run_cli(argc, argv, std::cout, std::cerr); }
