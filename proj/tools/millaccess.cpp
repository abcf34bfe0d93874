#include "cli_app.hpp"

int main(int argc, char** argv) { return millaccess::cli::run_cli(argc, argv); }
