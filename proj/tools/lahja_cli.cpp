#include "cli.hpp"

int main(int argc, char** argv) { return lahja::cli::run(argc, argv); }
