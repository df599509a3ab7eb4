#include "circlaw/blas_runtime.hpp"

#include <unistd.h>

#include <cctype>
#include <cstdlib>
#include <string>

extern "C" char* openblas_get_corename(void);
extern "C" void openblas_set_num_threads(int);

namespace circlaw {

const char* blas_core_name() {
  static const std::string name = [] {
    std::string s = openblas_get_corename();
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  }();
  return name.c_str();
}

void set_blas_threads(int threads) { openblas_set_num_threads(threads < 1 ? 1 : threads); }

void pin_blas_kernel(char** argv) {
  if (std::getenv("OPENBLAS_CORETYPE") != nullptr) return;
  if (std::string(blas_core_name()) != "cooperlake") return;
  ::setenv("OPENBLAS_CORETYPE", "SkylakeX", 1);
  // exec the resolved path so the process keeps its own name
  char path[4096];
  const ssize_t len = ::readlink("/proc/self/exe", path, sizeof(path) - 1);
  if (len <= 0) return;
  path[len] = '\0';
  ::execv(path, argv);
}

}  // namespace circlaw
