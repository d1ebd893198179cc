#include "commands.hpp"

int main(int argc, char** argv) { return abc::cli::run(argc, argv); }
