#include <exception>
#include <iostream>

#include "hexcnn/cli/commands.hpp"

int main(int argc, char** argv) {
  try {
    return hexcnn::cli::run(argc, argv, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return hexcnn::cli::kUsage;
  }
}
