#include "mcqmc/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace mcqmc {

std::size_t worker_count() {
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MCQMC_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap > 0) workers = std::min(workers, static_cast<std::size_t>(cap));
    } catch (const std::exception&) {
      // unparsable value: ignore the cap
    }
  }
  return workers;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace mcqmc
