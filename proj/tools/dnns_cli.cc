#include <iostream>
#include <string>
#include <vector>

#include "dnns/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return dnns::run_cli(args, std::cout, std::cerr);
}
