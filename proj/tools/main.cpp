#include "stiffsense/cli.hpp"

int main(int argc, char** argv) { return stiffsense::cli::run(argc, argv); }
