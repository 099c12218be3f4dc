#include "commands.hpp"

int main(int argc, char** argv) { return scatterkit::cli::run(argc, argv); }
