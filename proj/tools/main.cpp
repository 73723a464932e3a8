#include "riskbench/cli.hpp"

int main(int argc, char** argv) { return riskbench::cli::run(argc, argv); }
