#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ranklab/rng.hpp"
#include "ranklab/stats.hpp"

namespace ranklab {

/// How the exponential partial sums are normalized into order statistics.
///  - PaperSn: Y_k = S_k / S_n over n increments, so Y_n == 1.
///  - BetaSn1: Y_k = S_k / S_{n+1} over n+1 increments; (Y_1..Y_n) are the
///    order statistics of n iid uniforms and Y_k ~ Beta(k, n-k+1).
enum class Normalization { PaperSn, BetaSn1 };
const char* to_string(Normalization n) noexcept;

struct OrderStatSample {
  std::int64_t n = 0;
  Normalization normalization = Normalization::PaperSn;
  std::vector<double> sums;        // S_1..S_n (S_{n+1} appended for BetaSn1)
  std::vector<double> order_stats; // Y_1..Y_n

  /// S_n, the quantity the large-deviation event is defined through.
  double total() const { return sums.at(static_cast<std::size_t>(n - 1)); }
};

/// Builds the order statistics from a given increment stream; needs n
/// increments for PaperSn and n + 1 for BetaSn1.
OrderStatSample order_stats_from_increments(std::span<const double> increments, std::int64_t n,
                                            Normalization normalization);

OrderStatSample sample_order_stats(std::int64_t n, Normalization normalization, RngStream& rng);

/// Indicator of A_n = { n / S_n > 1 + epsilon }.
struct LargeDevEvent {
  double epsilon = 0.0;
  bool occurred = false;
};

LargeDevEvent event_An(const OrderStatSample& sample, double epsilon);

/// Monte Carlo estimate of P(A_n). S_n ~ Gamma(n, 1) is drawn directly.
MomentEstimate prob_An(std::int64_t n, double epsilon, std::int64_t trials, const ParallelConfig& parallel);

} // namespace ranklab
