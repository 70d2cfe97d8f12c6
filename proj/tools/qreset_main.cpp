#include "qreset/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return qreset::cli::run(argc, argv, std::cout, std::cerr);
}
