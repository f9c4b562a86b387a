#include "hienet/cli.hpp"

int main(int argc, char** argv) { return hienet::cli_main(argc, argv); }
