#include "igs_cli.hpp"

int main(int argc, char** argv) { return igs::cli::run(argc, argv); }
