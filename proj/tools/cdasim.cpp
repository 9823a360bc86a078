#include "cda/cli/cli.hpp"

int main(int argc, char** argv) { return cda::cli::cli_main(argc, argv); }
