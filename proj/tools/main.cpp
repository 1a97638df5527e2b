#include <string>
#include <vector>

#include "stemvine/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return stemvine::cli::run(args);
}
