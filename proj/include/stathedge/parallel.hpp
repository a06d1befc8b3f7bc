#pragma once

#include <cstddef>
#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace stathedge {

/// Process-wide default worker count used by grid and Monte Carlo loops.
/// Results never depend on it: work is split over disjoint indices and reduced in a fixed order.
void set_default_workers(int workers);
int default_workers();

/// Calls fn(i) for i in [0, n) on up to `workers` threads (0 = default).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int workers = 0);

/// Pairwise summation; the association order depends only on values.size().
double pairwise_sum(std::span<const double> values);

/// Philox4x32-10 block of four 32-bit words for (counter, key).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                         std::array<std::uint32_t, 2> key);

/// Counter-based stream: key = seed, counter = (draw block, path index). The i-th path of seed s
/// always sees the same numbers.
class PathRng {
 public:
  PathRng(std::uint64_t seed, std::uint64_t stream);
  std::uint64_t next_u64();
  /// Uniform in (0, 1).
  double uniform();
  double normal();

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace stathedge
