#include "coulosc/cli.hpp"

int main(int argc, char** argv) { return coulosc::cli::run(argc, argv); }
