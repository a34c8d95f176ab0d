#include "rmtlab/harness.hpp"

int main(int argc, char** argv) { return rmtlab::run_cli(argc, argv); }
