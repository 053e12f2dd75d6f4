#include "commands.hpp"

int main(int argc, char** argv) { return mvoe::cli::run(argc, argv); }
