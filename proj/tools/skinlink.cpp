#include "skinlink/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return skinlink::run_cli(argc, argv, std::cout, std::cerr); }
