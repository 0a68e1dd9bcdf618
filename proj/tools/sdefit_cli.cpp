#include "commands.hpp"

int main(int argc, char** argv) { return sdefit::cli::run(argc, argv); }
