#include "xload/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "xload/error.hpp"

namespace xload {

double mean(const std::vector<double>& x) {
  if (x.empty()) throw InvalidArgument("mean of an empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double sample_sd(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw InvalidArgument("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("quantile level outside [0,1]");
  const double r = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(r));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = r - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double quantile(std::vector<double> x, double q) {
  std::sort(x.begin(), x.end());
  return quantile_sorted(x, q);
}

namespace {

// Shared rank rule; `at(i)` returns the i-th smallest of n values.
template <class At>
TailQuantile tail_rank(std::size_t n, double p_exceed, At at) {
  if (n == 0) throw InvalidArgument("tail quantile of an empty pool");
  if (!(p_exceed > 0.0 && p_exceed < 1.0))
    throw InvalidArgument("exceedance probability outside (0,1)");
  const double r = (1.0 - p_exceed) * static_cast<double>(n);
  if (r > static_cast<double>(n - 1)) return {at(n - 1), true};
  const auto lo = static_cast<std::size_t>(std::floor(r));
  const double frac = r - static_cast<double>(lo);
  if (lo + 1 >= n) return {at(lo), false};
  return {at(lo) + frac * (at(lo + 1) - at(lo)), false};
}

}  // namespace

TailQuantile upper_tail_quantile_sorted(const std::vector<double>& sorted, double p_exceed) {
  return tail_rank(sorted.size(), p_exceed, [&](std::size_t i) { return sorted[i]; });
}

TailPool::TailPool(std::size_t capacity) : capacity_(std::max<std::size_t>(capacity, 2)) {}

std::size_t TailPool::capacity_for(std::size_t pool_size, double p_min) {
  const double top = std::ceil(p_min * static_cast<double>(pool_size)) + 2.0;
  return static_cast<std::size_t>(std::min(top, static_cast<double>(pool_size) + 1.0));
}

void TailPool::push(double y) {
  ++count_;
  if (heap_.size() < capacity_) {
    heap_.push(y);
  } else if (y > heap_.top()) {
    heap_.pop();
    heap_.push(y);
  }
}

double TailPool::threshold() const {
  if (heap_.size() < capacity_) return -std::numeric_limits<double>::infinity();
  return heap_.top();
}

TailQuantile TailPool::upper_tail_quantile(double p_exceed) const {
  std::vector<double> top;
  top.reserve(heap_.size());
  auto copy = heap_;
  while (!copy.empty()) {
    top.push_back(copy.top());
    copy.pop();
  }
  // top is ascending; element i of the full pool sits at i - offset.
  const std::size_t offset = count_ - top.size();
  return tail_rank(count_, p_exceed, [&](std::size_t i) {
    if (i < offset) throw InvalidState("tail pool is too small for this quantile");
    return top[i - offset];
  });
}

DrawSummary summarize(const std::vector<double>& draws) {
  std::vector<double> sorted = draws;
  std::sort(sorted.begin(), sorted.end());
  DrawSummary s;
  s.mean = mean(sorted);
  s.median = quantile_sorted(sorted, 0.5);
  s.lower = quantile_sorted(sorted, 0.025);
  s.upper = quantile_sorted(sorted, 0.975);
  return s;
}

}  // namespace xload
