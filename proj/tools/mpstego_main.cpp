#include "mpstego/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return mpstego::run_cli(argc, argv, std::cout, std::cerr);
}
