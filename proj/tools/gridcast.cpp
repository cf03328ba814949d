#include <iostream>

#include "gridcast/cli.hpp"

int main(int argc, char **argv) {
	return gridcast::cli::run(argc, argv, std::cout, std::cerr);
}
