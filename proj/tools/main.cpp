#include "gscat/cli.hpp"

int main(int argc, char** argv) { return gscat::cli::run(argc, argv); }
