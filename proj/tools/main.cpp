#include <iostream>
#include <string>
#include <vector>

#include "lswmkc/cli.hpp"

int main(int argc, char** argv) {
  return lswmkc::run_command(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
