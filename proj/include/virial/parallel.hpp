#ifndef VIRIAL_PARALLEL_HPP_
#define VIRIAL_PARALLEL_HPP_

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace virial {

// Worker-count control.  Defaults to VIRIAL_NOGO_THREADS when set, else
// the hardware concurrency.  Results are bit-stable across thread counts
// because reductions store per-index partials and combine them in index
// order.
int max_threads();
void set_max_threads(int n);

template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(max_threads()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failed.load() && error) std::rethrow_exception(error);
}

// Compensated accumulator; summing nonnegative terms stays nonnegative.
struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    double y = x - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

}  // namespace virial

#endif  // VIRIAL_PARALLEL_HPP_
