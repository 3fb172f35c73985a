#include "epirl/cli.hpp"

int main(int argc, char** argv) { return epirl::run_cli(argc, argv); }
