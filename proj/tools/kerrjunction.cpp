#include "kerrj/cli.hpp"

int main(int argc, char** argv) { return kerrj::run_cli(argc, argv); }
