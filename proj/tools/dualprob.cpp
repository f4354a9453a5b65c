#include "dualprob/cli.hpp"

int main(int argc, char** argv) { return dualprob::cli::run_command(argc, argv); }
