#include "cmsym/cli.hpp"

int main(int argc, char **argv) { return cmsym::cli::run(argc, argv); }
