#include "virial/parallel.hpp"

#include <cstdlib>

namespace virial {

namespace {

int initial_threads() {
  if (const char* env = std::getenv("VIRIAL_NOGO_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

std::atomic<int>& thread_setting() {
  static std::atomic<int> n{initial_threads()};
  return n;
}

}  // namespace

int max_threads() { return thread_setting().load(); }

void set_max_threads(int n) {
  thread_setting().store(n >= 1 ? n : 1);
}

}  // namespace virial
