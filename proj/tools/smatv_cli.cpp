#include <iostream>

#include "smatv/interface.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return smatv::run_cli(args, std::cout, std::cerr);
}
