#include "gscat/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace gscat {

int worker_count() {
  int cap = 0;
  if (const char* env = std::getenv("GSCAT_THREADS")) {
    try {
      cap = std::stoi(env);
    } catch (const std::exception&) {
      cap = 0;
    }
  }
  if (cap <= 0) cap = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(cap, 1);
}

namespace {
thread_local bool inside_worker = false;
}  // namespace

void parallel_for(int count, const std::function<void(int)>& body) {
  if (count <= 0) return;
  // Nested calls run inline on the calling worker.
  const int workers = inside_worker ? 1 : std::min(worker_count(), count);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  auto drain = [&] {
    const bool outer = inside_worker;
    inside_worker = true;
    for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
    inside_worker = outer;
  };
  if (workers == 1) {
    drain();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers - 1));
    for (int t = 1; t < workers; ++t) pool.emplace_back(drain);
    drain();
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace gscat
