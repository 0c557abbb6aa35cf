#include "commands.hpp"

int main(int argc, char** argv) { return ergolab::cli::main(argc, argv); }
