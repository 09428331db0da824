#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <span>
#include <thread>
#include <utility>
#include <vector>

namespace ranklab {

/// Monte Carlo estimate of E[Z^p] (or of a probability) with its standard error.
struct MomentEstimate {
  double p = 1.0;
  double mean = 0.0;
  double std_error = 0.0; // sample standard deviation / sqrt(count)
  std::int64_t count = 0;
};

/// Streaming mean/variance (Welford). merge() is Chan's pairwise update, so
/// chunk results can be combined in a fixed order independent of scheduling.
class Accumulator {
public:
  void push(double x) noexcept {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }

  void merge(const Accumulator& other) noexcept {
    if (other.count_ == 0) return;
    if (count_ == 0) {
      *this = other;
      return;
    }
    const double n1 = static_cast<double>(count_);
    const double n2 = static_cast<double>(other.count_);
    const double delta = other.mean_ - mean_;
    const double n = n1 + n2;
    mean_ += delta * n2 / n;
    m2_ += other.m2_ + delta * delta * n1 * n2 / n;
    count_ += other.count_;
  }

  std::int64_t count() const noexcept { return count_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept {
    return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
  }
  double std_error() const noexcept {
    return count_ > 1 ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0;
  }

  MomentEstimate estimate(double p) const noexcept { return {p, mean_, std_error(), count_}; }

private:
  std::int64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Execution settings shared by every Monte Carlo driver.
///
/// Work is cut into fixed-size chunks; chunk i draws from stream
/// (seed, stream_base + i). Results depend on (seed, chunk_size) only, never on
/// the number of workers.
struct ParallelConfig {
  std::uint64_t seed = 1;
  std::uint64_t stream_base = 0;
  int workers = 1;
  std::int64_t chunk_size = 4096;
};

/// Run fn(chunk_index, begin, end) over [0, total) in chunks, on
/// config.workers threads, returning per-chunk results in chunk order.
template <class Fn>
auto run_chunks(std::int64_t total, const ParallelConfig& config, Fn&& fn)
    -> std::vector<decltype(fn(std::int64_t{}, std::int64_t{}, std::int64_t{}))> {
  using Result = decltype(fn(std::int64_t{}, std::int64_t{}, std::int64_t{}));
  const std::int64_t chunk = std::max<std::int64_t>(1, config.chunk_size);
  const std::int64_t n_chunks = total <= 0 ? 0 : (total + chunk - 1) / chunk;
  std::vector<Result> results(static_cast<std::size_t>(n_chunks));

  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= n_chunks) return;
      try {
        const std::int64_t begin = i * chunk;
        results[static_cast<std::size_t>(i)] = fn(i, begin, std::min(total, begin + chunk));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n_chunks);
      }
    }
  };

  const int workers =
      static_cast<int>(std::clamp<std::int64_t>(config.workers, 1, std::max<std::int64_t>(1, n_chunks)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

/// Least-squares slope and intercept of y on x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

} // namespace ranklab
