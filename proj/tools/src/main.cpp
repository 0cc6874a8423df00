#include "cogd/cli.hpp"

int main(int argc, char** argv) { return cogd::cli::run(argc, argv); }
