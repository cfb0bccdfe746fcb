#include "oem/cli.hpp"

int main(int argc, char** argv) { return oem::cli_main(argc, argv); }
