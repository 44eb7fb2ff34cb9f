#include "todakit/cli.hpp"

int main(int argc, char** argv) { return todakit::cli_main(argc, argv); }
