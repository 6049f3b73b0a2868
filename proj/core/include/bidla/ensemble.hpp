#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

#include "bidla/rng.hpp"

namespace bidla {

/// Worker count: explicit request, else the BIDLA_WORKERS environment
/// variable, else hardware concurrency.
unsigned resolve_workers(unsigned requested = 0);

/// Independent replica stream: pure function of (master_seed, experiment_id,
/// replica), so results never depend on worker count or scheduling.
inline RandomStream replica_stream(std::uint64_t master_seed,
                                   std::uint64_t experiment_id,
                                   std::uint64_t replica) {
  std::uint64_t key = mix64(master_seed ^ 0x6a09e667f3bcc909ULL);
  key = mix64(key ^ experiment_id);
  key = mix64(key ^ replica);
  return RandomStream(key);
}

/// Runs fn(replica_index) for every index in [0, n) across a worker pool.
/// Callers collect results by index, so the merged output is deterministic.
/// The first exception thrown by any replica is rethrown here.
template <class Fn>
void parallel_replicas(std::uint64_t n, unsigned workers, Fn&& fn) {
  workers = resolve_workers(workers);
  if (workers <= 1 || n <= 1) {
    for (std::uint64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto body = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::uint64_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  const unsigned count = static_cast<unsigned>(
      std::min<std::uint64_t>(workers, n));
  pool.reserve(count);
  for (unsigned w = 0; w < count; ++w) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

/// Streaming mean / variance (Welford).
class MeanAccumulator {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const {
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
  }
  double standard_error() const;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Standard error of a binomial proportion estimate.
double binomial_se(double p_hat, std::uint64_t n);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

/// Regularized upper incomplete gamma Q(a, x); the chi-square survival
/// function is Q(df/2, stat/2).
double gamma_q(double a, double x);
double chi_square_pvalue(double stat, int df);

}  // namespace bidla
