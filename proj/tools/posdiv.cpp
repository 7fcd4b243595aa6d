#include <string>
#include <vector>

#include "posdiv/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return posdiv::cli(args);
}
