#include "domelimit/cli.hpp"

int main(int argc, char** argv) { return dome::cli_main(argc, argv); }
