#include <iostream>
#include <string>
#include <vector>

#include "flakiloc/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return flakiloc::cli::cli_main(args, std::cout, std::cerr);
}
