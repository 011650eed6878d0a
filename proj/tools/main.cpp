#include "spdemax/runner.hpp"

int main(int argc, char** argv) {
  return spdemax::runner::cli_main(argc, argv);
}
