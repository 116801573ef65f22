#include "kvn/cli.hpp"

int main(int argc, char** argv) { return kvn::cli::main_entry(argc, argv); }
