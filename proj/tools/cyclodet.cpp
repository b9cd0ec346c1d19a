#include "cyclodet/cli.hpp"

int main(int argc, char** argv) { return cyclodet::cli::run_cli(argc, argv); }
