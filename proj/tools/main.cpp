#include "cli.hpp"

int main(int argc, char** argv) { return bloc::cli::run_cli(argc, argv); }
