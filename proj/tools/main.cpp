#include "cli.hpp"

int main(int argc, char** argv) { return sigradar::cli::run(argc, argv); }
