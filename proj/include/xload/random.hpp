#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include <boost/random/normal_distribution.hpp>

namespace xload {

// A single random stream. Streams are never shared between concurrent
// consumers; independent work gets its own stream via split().
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Derives an independent child stream. Advances this stream.
  Rng split();

  // Uniform on the open interval (0, 1).
  double uniform();
  double normal() { return normal_(engine_); }
  // Uniform integer in [0, n).
  std::size_t index(std::size_t n);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_;
};

}  // namespace xload
