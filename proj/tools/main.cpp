#include "strokeforest/experiment.hpp"

int main(int argc, char** argv) { return strokeforest::cli_main(argc, argv); }
