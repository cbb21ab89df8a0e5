#include <iostream>
#include <string>
#include <vector>

#include "jclab/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv, argv + argc);
    return jclab::run_cli(args, std::cout, std::cerr);
}
