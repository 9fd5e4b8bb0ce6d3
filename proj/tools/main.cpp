#include <iostream>

#include "idma/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return idma::cli::run(args, std::cout, std::cerr);
}
