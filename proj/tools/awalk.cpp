#include "awalk/cli.hpp"

int main(int argc, char** argv) { return awalk::cli::run(argc, argv); }
