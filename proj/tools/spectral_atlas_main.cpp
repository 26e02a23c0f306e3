#include "spectral_atlas/cli.hpp"

int main(int argc, char** argv) { return atlas::cli::run(argc, argv); }
