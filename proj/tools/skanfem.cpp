#include "skanfem/cli.hpp"

int main(int argc, char** argv) { return skanfem::cli::main(argc, argv); }
