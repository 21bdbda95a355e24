#pragma once

#include <array>
#include <cstdint>

namespace gpricing::market {

/// Philox4x32-10 block function (Salmon et al., SC'11). Pure: the output
/// depends only on (counter, key).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// SplitMix64 finaliser; used to derive independent seeds from tuples.
std::uint64_t mix64(std::uint64_t x);

/// Seed for a sub-computation identified by (seed, a, b).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Inverse standard-normal CDF, accurate to a few ulps on (0, 1).
double inverse_normal_cdf(double p);

/// Counter-based stream: the n-th draw of stream (seed, stream) is a pure
/// function of (seed, stream, n). Distinct streams can be consumed on
/// different threads in any order with identical results.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  /// Standard normal via inverse CDF (no rejection).
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int pos_ = 2;
};

}  // namespace gpricing::market
