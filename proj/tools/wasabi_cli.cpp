#include "wasabi/cli.hpp"

int main(int argc, char** argv) { return wasabi::run_cli(argc, argv); }
