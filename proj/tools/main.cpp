#include <iostream>

#include "entail/cli.hpp"

int main(int argc, char** argv) {
    return entail::cli::run(argc, argv, std::cout, std::cerr);
}
