#include "gridtopo/cli.hpp"

int main(int argc, char** argv) { return gridtopo::run_cli(argc, argv); }
