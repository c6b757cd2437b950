#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"
#include "kgh/log.hpp"

int main(int argc, char** argv) {
  // tests inspect warnings through drain_warnings(); keep stderr readable
  kgh::set_warnings_quiet(true);
  doctest::Context ctx(argc, argv);
  return ctx.run();
}
