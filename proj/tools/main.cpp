#include "cloudq/cli.hpp"

int main(int argc, char** argv) {
  return cloudq::cli::main(argc, argv);
}
