#include <iostream>

#include "besselheat/cli.hpp"

int main(int argc, char** argv)
{
    return besselheat::cli::run(argc, argv, std::cout, std::cerr);
}
