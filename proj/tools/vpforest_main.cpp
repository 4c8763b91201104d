#include "vpforest/cli.hpp"

int main(int argc, char** argv) {
    return vpforest::run_cli(argc, argv);
}
