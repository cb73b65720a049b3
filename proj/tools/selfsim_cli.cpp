#include "selfsim/cli_io.hpp"

int main(int argc, char** argv) { return selfsim::run(argc, argv); }
