#include "mkq/cli.hpp"

int main(int argc, char** argv) { return mkq::run_cli(argc, argv); }
