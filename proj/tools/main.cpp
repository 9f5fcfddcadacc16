#include "spectral_lab/cli.hpp"

int main(int argc, char** argv) { return spectral_lab::run_cli(argc, argv); }
