#include <string>
#include <vector>

#include "mixsel/cli.hpp"

int main(int argc, char** argv) {
    return mixsel::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
