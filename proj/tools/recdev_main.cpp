#include <iostream>
#include <string>
#include <vector>

#include "recdev/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return recdev::cli::run(args, std::cout, std::cerr);
}
