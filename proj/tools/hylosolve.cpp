#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return hylo::cli::run(argc, argv, std::cerr); }
