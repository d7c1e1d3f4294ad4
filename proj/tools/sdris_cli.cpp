#include "cli_app.hpp"

int main(int argc, char** argv) { return sdris::cli::run(argc, argv); }
