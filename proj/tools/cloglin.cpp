#include "cli_app.hpp"

int main(int argc, char** argv) { return cloglin::cli::run(argc, argv); }
