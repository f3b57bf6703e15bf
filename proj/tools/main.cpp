#include "edgerecon/cli.hpp"

int main(int argc, char** argv) { return edgerecon::cli::run(argc, argv); }
