#include <iostream>

#include "stc/cli/commands.hpp"

int main(int argc, char** argv) { return stc::cli::run_main(argc, argv, std::cout, std::cerr); }
