#include "qgvae/cli/commands.hpp"

int main(int argc, char** argv) { return qgvae::cli::run_cli(argc, argv); }
