#include "rr/cli.hpp"

int main(int argc, char** argv) { return rr::cli::main(argc, argv); }
