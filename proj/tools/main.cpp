#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return nmp::cli::main_with_args(args, std::cout, std::cerr);
}
