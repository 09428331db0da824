#include "ranklab/orderstat.hpp"

#include <stdexcept>

#include "ranklab/dist.hpp"

namespace ranklab {

const char* to_string(Normalization n) noexcept {
  return n == Normalization::PaperSn ? "PaperSn" : "BetaSn1";
}

OrderStatSample order_stats_from_increments(std::span<const double> increments, std::int64_t n,
                                            Normalization normalization) {
  if (n < 1) throw std::invalid_argument("order statistics need n >= 1");
  const std::int64_t needed = normalization == Normalization::PaperSn ? n : n + 1;
  if (static_cast<std::int64_t>(increments.size()) < needed)
    throw std::invalid_argument("not enough increments for the requested normalization");

  OrderStatSample out;
  out.n = n;
  out.normalization = normalization;
  out.sums.resize(static_cast<std::size_t>(needed));
  double s = 0.0;
  for (std::int64_t i = 0; i < needed; ++i) {
    s += increments[static_cast<std::size_t>(i)];
    out.sums[static_cast<std::size_t>(i)] = s;
  }
  const double denom = out.sums.back();
  out.order_stats.resize(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i)
    out.order_stats[static_cast<std::size_t>(i)] = out.sums[static_cast<std::size_t>(i)] / denom;
  return out;
}

OrderStatSample sample_order_stats(std::int64_t n, Normalization normalization, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("order statistics need n >= 1");
  const std::int64_t needed = normalization == Normalization::PaperSn ? n : n + 1;
  std::vector<double> inc(static_cast<std::size_t>(needed));
  for (auto& x : inc) x = sample_exp1(rng);
  return order_stats_from_increments(inc, n, normalization);
}

LargeDevEvent event_An(const OrderStatSample& sample, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  return {epsilon, static_cast<double>(sample.n) / sample.total() > 1.0 + epsilon};
}

MomentEstimate prob_An(std::int64_t n, double epsilon, std::int64_t trials, const ParallelConfig& parallel) {
  if (n < 1) throw std::invalid_argument("prob_An needs n >= 1");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (trials < 1) throw std::invalid_argument("prob_An needs at least one trial");
  const double nd = static_cast<double>(n);
  auto parts = run_chunks(trials, parallel, [&](std::int64_t chunk, std::int64_t begin, std::int64_t end) {
    RngStream rng(parallel.seed, parallel.stream_base + static_cast<std::uint64_t>(chunk));
    Accumulator acc;
    for (std::int64_t i = begin; i < end; ++i) {
      const double total = sample_gamma(nd, rng);
      acc.push(nd / total > 1.0 + epsilon ? 1.0 : 0.0);
    }
    return acc;
  });
  Accumulator all;
  for (const auto& a : parts) all.merge(a);
  return all.estimate(1.0);
}

} // namespace ranklab
