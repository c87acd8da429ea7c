#include "depthsr/cli.hpp"

int main(int argc, char** argv) { return depthsr::cli::run(argc, argv); }
