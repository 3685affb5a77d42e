#include <iostream>
#include <string>
#include <vector>

#include "ising/cli.hpp"

int main(int argc, char** argv)
{
    const std::vector<std::string> args(argv, argv + argc);
    return ising::cli::run(args, std::cout, std::cerr);
}
