#include "triflow/cli.hpp"

int main(int argc, char** argv) { return triflow::cli_main(argc, argv); }
