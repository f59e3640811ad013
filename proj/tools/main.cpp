#include "cli_app.hpp"

int main(int argc, char** argv) { return ssb::cli::run_cli(argc, argv); }
