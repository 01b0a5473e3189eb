#include "dsc_ptc/cli.hpp"

int main(int argc, char** argv) { return dsc_ptc::cli::dispatch(argc, argv); }
