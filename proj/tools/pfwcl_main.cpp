#include "pfwcl/cli.hpp"

int main(int argc, char** argv) { return pfwcl::cli::run(argc, argv); }
