#include <iostream>
#include <string>
#include <vector>

#include "mermin/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv, argv + argc);
    return mermin::cli::run(args, std::cout, std::cerr);
}
