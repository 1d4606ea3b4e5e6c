#include "wiretap/cli.hpp"

int main(int argc, char** argv) { return wiretap::cli::run(argc, argv); }
