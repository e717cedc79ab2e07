#include "htsne/cli.hpp"

int main(int argc, char** argv) { return htsne::cli_main(argc, argv); }
