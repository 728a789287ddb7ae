#include "rsint/cli.hpp"

int main(int argc, char** argv) { return rsint::cli_main(argc, argv); }
