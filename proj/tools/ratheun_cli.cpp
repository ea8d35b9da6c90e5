#include "ratheun/cli.hpp"

int main(int argc, char** argv) { return ratheun::cli::run(argc, argv); }
