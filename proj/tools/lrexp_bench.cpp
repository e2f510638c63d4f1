#include <lrexp/bench.hpp>

int main(int argc, char** argv) { return lrexp::bench::run_cli(argc, argv); }
