#include <string>
#include <vector>

#include "wfsel/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return wfsel::cli::run(args);
}
