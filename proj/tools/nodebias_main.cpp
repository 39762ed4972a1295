#include <string>
#include <vector>

#include "nodebias/experiment.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return nodebias::run_cli(args);
}
