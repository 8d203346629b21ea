#include "honeymetric/cli/app.hpp"

int main(int argc, char** argv) { return honeymetric::cli::run(argc, argv); }
