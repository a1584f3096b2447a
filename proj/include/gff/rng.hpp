#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>

namespace gff {

// Philox4x64-10 counter-based generator. The key is (seed, stream) and the
// counter block is (block_index, replica, 0, 0), so every (seed, stream,
// replica) triple is an independent, reproducible stream that can be consumed
// in parallel without shared state.
class Philox {
 public:
  Philox(std::uint64_t seed, std::uint64_t stream, std::uint64_t replica = 0)
      : key_{seed, stream}, replica_(replica) {}

  std::uint64_t next_u64() {
    if (pos_ == 4) {
      buf_ = block(key_, {block_, replica_, 0, 0});
      ++block_;
      pos_ = 0;
    }
    return buf_[pos_++];
  }

  // Uniform on (0,1), 53-bit mantissa, never exactly 0 or 1.
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [0, n); modulo bias is n/2^64, far below any
  // statistical tolerance used here.
  std::uint32_t next_below(std::uint32_t n) {
    return static_cast<std::uint32_t>(next_u64() % n);
  }

  static std::array<std::uint64_t, 4> block(
      const std::array<std::uint64_t, 2>& key,
      std::array<std::uint64_t, 4> ctr);

 private:
  std::array<std::uint64_t, 2> key_;
  std::uint64_t replica_ = 0;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 4> buf_{};
  int pos_ = 4;
};

// Standard normals via Box-Muller on Philox uniforms (pairwise, deterministic).
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, std::uint64_t stream,
                 std::uint64_t replica = 0)
      : rng_(seed, stream, replica) {}

  double next();
  void fill(Eigen::Ref<Eigen::VectorXd> out);
  Philox& raw() { return rng_; }

 private:
  Philox rng_;
  double spare_ = 0;
  bool has_spare_ = false;
};

}  // namespace gff
