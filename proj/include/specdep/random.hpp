#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace specdep {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
///
/// The 64-bit seed is the key; a 128-bit counter starts at 0 and advances by
/// one per block of four 32-bit outputs. Outputs are emitted lane 0..3.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  static constexpr const char* name = "philox4x32-10";

  explicit Philox4x32(std::uint64_t seed) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (lane_ == 4) {
      block_ = generate(counter_, key_);
      increment();
      lane_ = 0;
    }
    return block_[lane_++];
  }

  /// One Philox block for an explicit counter and key.
  static std::array<std::uint32_t, 4> generate(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) noexcept {
    constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
      key[0] += kW0;
      key[1] += kW1;
    }
    return ctr;
  }

 private:
  void increment() noexcept {
    for (auto& word : counter_)
      if (++word != 0) break;
  }

  std::array<std::uint32_t, 4> counter_{};
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> block_{};
  int lane_ = 4;
};

/// Standard normal variates by Box-Muller from 53-bit uniforms.
/// Version 1: each pair of 64-bit words (two engine outputs each, low word
/// first) yields u1 in (0,1] and u2 in [0,1); both variates of a pair are used,
/// cosine branch first.
class NormalStream {
 public:
  static constexpr int version = 1;

  explicit NormalStream(std::uint64_t seed) noexcept : engine_(seed) {}

  double operator()() noexcept;

 private:
  std::uint64_t next_u64() noexcept {
    const std::uint64_t lo = engine_();
    const std::uint64_t hi = engine_();
    return lo | (hi << 32);
  }

  Philox4x32 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace specdep
