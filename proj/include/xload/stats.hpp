#pragma once

#include <cstddef>
#include <queue>
#include <vector>

namespace xload {

double mean(const std::vector<double>& x);
// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
double sample_sd(const std::vector<double>& x);

// Linear interpolation between order statistics at rank q * (n - 1).
// `sorted` must be ascending.
double quantile_sorted(const std::vector<double>& sorted, double q);
double quantile(std::vector<double> x, double q);

struct TailQuantile {
  double value = 0.0;
  // The requested rank fell beyond the largest draw.
  bool clamped = false;
};

// Upper-tail quantile of a pool of size P: the value at zero-based rank
// (1 - p) * P, linearly interpolated, clamped to the maximum when that
// rank exceeds P - 1.
TailQuantile upper_tail_quantile_sorted(const std::vector<double>& sorted, double p_exceed);

// Keeps the largest `capacity` values pushed into it, so upper-tail
// quantiles of huge pools need only O(capacity) memory.
class TailPool {
 public:
  explicit TailPool(std::size_t capacity);

  // Capacity needed to answer upper_tail_quantile for every p >= p_min in a
  // pool of the given size.
  static std::size_t capacity_for(std::size_t pool_size, double p_min);

  void push(double y);
  // Records n values known to lie below threshold() without storing them.
  void add_below_threshold(std::size_t n) { count_ += n; }
  // Values at or below this can never enter the pool.
  double threshold() const;
  std::size_t count() const { return count_; }
  TailQuantile upper_tail_quantile(double p_exceed) const;

 private:
  std::size_t capacity_;
  std::size_t count_ = 0;
  std::priority_queue<double, std::vector<double>, std::greater<double>> heap_;
};

struct DrawSummary {
  double mean = 0.0;
  double median = 0.0;
  double lower = 0.0;  // 2.5% point
  double upper = 0.0;  // 97.5% point
};

DrawSummary summarize(const std::vector<double>& draws);

}  // namespace xload
