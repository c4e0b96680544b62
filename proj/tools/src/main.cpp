#include <iostream>

#include "chaostune_cli/cli.hpp"

int main(int argc, char** argv) {
    return chaostune::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
