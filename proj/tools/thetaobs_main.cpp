#include <iostream>
#include <vector>

#include "thetaobs/cli.hpp"

int main(int argc, char **argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return thetaobs::cli::run(args, std::cout, std::cerr);
}
