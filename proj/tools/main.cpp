#include "scalespec/cli.hpp"

int main(int argc, char** argv) { return scalespec::cli::run(argc, argv); }
