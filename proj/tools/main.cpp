#include "cli_app.hpp"

int main(int argc, char** argv) { return catalytic::cli_main(argc, argv, std::cout, std::cerr); }
