#include "vandermonde/cli.hpp"

int main(int argc, char** argv) { return vandermonde::cli::run(argc, argv); }
