#include "gspsim/cli.hpp"

int main(int argc, char** argv) { return gspsim::cli::run(argc, argv); }
