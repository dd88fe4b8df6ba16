#include "einwarp/cli.hpp"

int main(int argc, char** argv) { return einwarp::cli::run(argc, argv); }
