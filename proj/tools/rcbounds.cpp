#include "rcbounds/cli.hpp"

int main(int argc, char** argv) { return rcb::cli::run(argc, argv); }
