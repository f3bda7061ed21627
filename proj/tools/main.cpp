#include "runner.hpp"

int main(int argc, char** argv) { return ozawa::cli::main_entry(argc, argv); }
