#include <graypixel/cli.hpp>

#include <iostream>

int main(int argc, char** argv) { return graypixel::cli::run(argc, argv, std::cout, std::cerr); }
