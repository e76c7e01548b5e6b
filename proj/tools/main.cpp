#include "qtp/cli.hpp"
#include "qtp/tensor.hpp"

int main(int argc, char** argv) {
  qtp::ad::tune_allocator();
  return qtp::run_cli(argc, argv);
}
