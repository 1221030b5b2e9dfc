#include "qheat/cli.hpp"

int main(int argc, char** argv) { return qheat::cli::run_main(argc, argv); }
