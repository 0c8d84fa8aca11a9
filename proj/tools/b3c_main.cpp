#include "b3c/cli.hpp"

int main(int argc, char** argv) { return b3c::cli_main(argc, argv); }
