#include "ridgelab/cli.hpp"

int main(int argc, char** argv) { return ridgelab::cli::run(argc, argv); }
