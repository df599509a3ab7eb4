#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "circlaw/blas_runtime.hpp"

int main(int argc, char** argv) {
  circlaw::pin_blas_kernel(argv);
  doctest::Context ctx(argc, argv);
  return ctx.run();
}
