#include "bsq/cli.hpp"

int main(int argc, char** argv) { return bsq::cli::run(argc, argv); }
