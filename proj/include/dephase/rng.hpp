// dephase/rng.hpp — counter-based random streams (Philox4x32-10)
//
// Streams are keyed by (seed, stream index): stream i yields the same draw
// sequence no matter how an ensemble is partitioned across workers, which is
// what makes simulation output bit-reproducible under any parallelism degree.
// Two threads must not advance the same stream object concurrently.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace dephase {

// Philox4x32 with 10 rounds (Salmon et al. round constants). One block maps a
// 128-bit counter plus 64-bit key to 128 bits of output.
struct Philox4x32 {
  static constexpr std::uint32_t kMul0  = 0xD2511F53u;
  static constexpr std::uint32_t kMul1  = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> x,
                                            std::array<std::uint32_t, 2> k) {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = std::uint64_t{kMul0} * x[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * x[2];
      x = {static_cast<std::uint32_t>(p1 >> 32) ^ x[1] ^ k[0],
           static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ x[3] ^ k[1],
           static_cast<std::uint32_t>(p0)};
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    return x;
  }
};

class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        base_{0, 0, static_cast<std::uint32_t>(stream),
              static_cast<std::uint32_t>(stream >> 32)} {}

  std::uint32_t next_u32() {
    if (pos_ == 4) refill();
    return buf_[pos_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return lo | (hi << 32);
  }

  // Uniform on the open interval (0, 1): 53-bit mantissa placed at interval
  // centers, so 0 and 1 are unreachable and log() is always safe.
  double next_double() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
  }

  // Standard normal via the trigonometric Box-Muller transform; the second
  // variate of each pair is cached.
  double next_gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = next_double();
    const double u2 = next_double();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    cached_ = radius * std::sin(angle);
    have_cached_ = true;
    return radius * std::cos(angle);
  }

  double next_exponential(double rate) {
    return -std::log(next_double()) / rate;
  }

  // Gamma(shape, 1) via Marsaglia-Tsang squeeze; shapes below 1 are boosted
  // with Gamma(shape) = Gamma(shape + 1) * U^(1/shape).
  double next_gamma(double shape) {
    if (shape < 1.0) {
      const double boost = std::pow(next_double(), 1.0 / shape);
      return next_gamma(shape + 1.0) * boost;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = next_gaussian();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = next_double();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

private:
  static constexpr double kPi = 3.14159265358979323846;

  void refill() {
    std::array<std::uint32_t, 4> ctr = base_;
    ctr[0] = static_cast<std::uint32_t>(block_);
    ctr[1] = base_[1] + static_cast<std::uint32_t>(block_ >> 32);
    buf_ = Philox4x32::block(ctr, key_);
    ++block_;
    pos_ = 0;
  }

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> base_; // {0, 0, stream_lo, stream_hi}
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

} // namespace dephase
