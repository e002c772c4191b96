#include <string>
#include <vector>

#include "gaitmimic/pipeline.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return gaitmimic::run_subcommand(args);
}
