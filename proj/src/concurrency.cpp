#include "walkaudit/concurrency.hpp"

#include "walkaudit/errors.hpp"

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace walkaudit::util {

void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& fn) {
  if (workers < 1)
    throw ValidationError("parallel_for: workers must be >= 1");
  if (count == 0)
    return;
  const int n_threads =
      static_cast<int>(std::min<std::size_t>(count, static_cast<std::size_t>(workers)));
  if (n_threads == 1) {
    for (std::size_t i = 0; i < count; ++i)
      fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count)
        return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error)
          first_error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t)
    threads.emplace_back(worker);
  for (auto& t : threads)
    t.join();
  if (first_error)
    std::rethrow_exception(first_error);
}

TokenBucket::TokenBucket(double tokens_per_second, double burst)
    : rate_(tokens_per_second), burst_(burst), tokens_(burst),
      last_refill_(std::chrono::steady_clock::now()) {
  if (!(rate_ > 0.0) || !(burst_ >= 1.0))
    throw ValidationError("token bucket: rate must be > 0 and burst >= 1");
}

void TokenBucket::acquire() {
  while (true) {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      const auto now = std::chrono::steady_clock::now();
      const double elapsed =
          std::chrono::duration<double>(now - last_refill_).count();
      tokens_ = std::min(burst_, tokens_ + elapsed * rate_);
      last_refill_ = now;
      if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return;
      }
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
}

} // namespace walkaudit::util
