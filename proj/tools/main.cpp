#include "omw/cli.hpp"

int main(int argc, char** argv) { return omw::cli::run(argc, argv); }
