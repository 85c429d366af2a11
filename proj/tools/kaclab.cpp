#include "kaclab/cli.hpp"

int main(int argc, char** argv) { return kaclab::run_cli(argc, argv); }
