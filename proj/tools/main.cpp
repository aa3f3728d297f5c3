#include "commands.hpp"

int main(int argc, char** argv) { return enspace::cli::main_entry(argc, argv); }
