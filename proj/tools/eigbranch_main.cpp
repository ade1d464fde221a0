#include <iostream>
#include <string>
#include <vector>

#include "eigbranch/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return eigbranch::run_cli(args, std::cout, std::cerr);
}
