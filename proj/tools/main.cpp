#include "cli.hpp"

int main(int argc, char** argv) { return redraw::cli::main(argc, argv); }
