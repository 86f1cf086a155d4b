#include "nvpair/cli.hpp"

int main(int argc, char** argv) { return nvpair::cli::run(argc, argv); }
