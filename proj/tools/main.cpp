#include "kpp/cli.hpp"

int main(int argc, char** argv) { return kpp::cli::run(argc, argv); }
