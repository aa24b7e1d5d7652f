#include "otcimpact/cli.hpp"

int main(int argc, char** argv) { return otcimpact::run_cli(argc, argv); }
