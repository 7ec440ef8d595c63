#include <iostream>
#include <string>
#include <vector>

#include "cos2q/cli.hpp"

int main(int argc, char** argv) {
  return cos2q::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
