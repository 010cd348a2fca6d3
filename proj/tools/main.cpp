#include <iostream>

#include "kbound_cli/commands.hpp"

int main(int argc, char** argv) { return kbound::cli::run(argc, argv, std::cout, std::cerr); }
