#include <iostream>

#include "rmtcorr/cli.hpp"

int main(int argc, char** argv)
{
    return rmtcorr::cli::run(argc, argv, std::cout, std::cerr);
}
