#include "warpedheat/cli.hpp"

int main(int argc, char** argv) { return warpedheat::cli::run(argc, argv); }
