#include "cli.hpp"

int main(int argc, char** argv) { return regspec::cli::run(argc, argv); }
