#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <mutex>

namespace walkaudit::util {

/// Runs fn(0..count-1) on up to `workers` threads. The first exception thrown
/// by any task is rethrown on the calling thread after all workers join.
void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& fn);

/// Token-bucket rate limiter shared by external-API clients. acquire()
/// blocks until a token is available.
class TokenBucket {
public:
  TokenBucket(double tokens_per_second, double burst);

  void acquire();

private:
  double rate_;
  double burst_;
  double tokens_;
  std::chrono::steady_clock::time_point last_refill_;
  std::mutex mutex_;
};

} // namespace walkaudit::util
