#include <cstdio>
#include <string>
#include <vector>

#include "umbra/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    umbra::cli::RunResult res = umbra::cli::run(args);
    if (!res.text.empty()) std::printf("%s\n", res.text.c_str());
    return res.exitCode;
}
