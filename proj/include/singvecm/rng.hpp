#pragma once

#include <array>
#include <cstdint>

namespace singvecm {

// Counter-based random numbers: Philox-4x32 with 10 rounds. A value is a pure
// function of (seed, stream, block index), so any replication, panel series,
// or draw can be generated independently of execution order and thread count.
//
// Stream allocation used across the project:
//   0                  parameter draws (draw_dgp, random family specs)
//   1 .. 2^24-1        Monte Carlo replications (stream = replication id + 1)
//   2^24 + j           idiosyncratic series j in panel simulation
// Retry of a failed replication perturbs the high stream bits, never the seed.

// One 10-round keyed permutation of a 128-bit counter. Exposed for the
// known-answer tests.
std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        const std::array<std::uint32_t, 2>& key);

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform();
  // Uniform on [lo, hi).
  double uniform(double lo, double hi);
  // Standard normal via Box-Muller; pairs are consumed in a fixed order.
  double gaussian();
  // Uniform integer in {0, ..., n-1}; n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);

 private:
  void refill();
  std::uint64_t next_u64();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int buf_pos_ = 4;
  double spare_gauss_ = 0.0;
  bool has_spare_gauss_ = false;
};

}  // namespace singvecm
