#include <iostream>

#include "klab/app.hpp"

int main(int argc, char** argv) { return klab::run_cli(argc, argv, std::cout, std::cerr); }
