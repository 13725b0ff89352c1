#include "normlab/cli.hpp"

int main(int argc, char** argv) { return normlab::cli::run(argc, argv); }
