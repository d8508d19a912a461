#include <iostream>

#include "lemsim/cli.hpp"

int main(int argc, char** argv)
{
    return lemsim::run_cli(argc, argv, std::cout, std::cerr);
}
