#include "xload/random.hpp"

#include <boost/random/uniform_int_distribution.hpp>

#include "xload/error.hpp"

namespace xload {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOk:
      return "OK";
    case ErrorCode::kPrecondition:
      return "PRECONDITION";
    case ErrorCode::kNumeric:
      return "NUMERIC";
    case ErrorCode::kIo:
      return "IO";
  }
  return "UNKNOWN";
}

Rng::Rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), 0x9e3779b9u};
  engine_.seed(seq);
}

Rng Rng::split() {
  const std::uint64_t a = engine_();
  const std::uint64_t b = engine_();
  Rng child(0);
  std::seed_seq seq{static_cast<std::uint32_t>(a),
                    static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b),
                    static_cast<std::uint32_t>(b >> 32)};
  child.engine_.seed(seq);
  return child;
}

double Rng::uniform() {
  // 53 random bits mapped to (0, 1); zero is excluded by the half offset.
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw InvalidArgument("Rng::index: empty range");
  boost::random::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(engine_);
}

}  // namespace xload
