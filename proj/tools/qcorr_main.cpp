#include <string>
#include <vector>

#include "qcorr/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return qcorr::cli::run(args);
}
