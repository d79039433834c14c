#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    return carmtrack::cli::run(args, std::cout, std::cerr);
}
