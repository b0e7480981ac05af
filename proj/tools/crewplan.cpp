#include "crewplan/cli.hpp"

int main(int argc, char** argv) { return crewplan::cli::run(argc, argv); }
