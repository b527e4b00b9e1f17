#include "doismol/harness.hpp"

int main(int argc, char** argv) { return doismol::run_cli(argc, argv); }
