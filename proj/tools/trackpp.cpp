#include <iostream>

#include "trackpp/cli.hpp"

int main(int argc, char** argv) {
    return trackpp::cli::run(argc, argv, std::cout, std::cerr);
}
