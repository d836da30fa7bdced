#include <iostream>

#include "pipeflow/io/cli.hpp"

int main(int argc, char **argv) { return pipeflow::io::cli_dispatch(argc, argv, std::cout, std::cerr); }
