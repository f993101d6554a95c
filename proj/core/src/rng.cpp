#include "edas/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace edas {

namespace {

constexpr std::uint32_t kMult0 = 0xD2511F53u;
constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& c,
                         const std::array<std::uint32_t, 2>& k) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kMult0) * c[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kMult1) * c[2];
  const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const auto lo0 = static_cast<std::uint32_t>(p0);
  const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const auto lo1 = static_cast<std::uint32_t>(p1);
  c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    philox_round(counter, key);
  }
  return counter;
}

RngStream::RngStream(std::uint64_t seed, std::uint32_t domain,
                     std::uint32_t replica, std::uint32_t agent,
                     std::uint32_t iteration)
    : key_{static_cast<std::uint32_t>(seed),
           static_cast<std::uint32_t>(seed >> 32)},
      addr_{iteration, agent, (domain << 28) | (replica & 0x0FFFFFFFu)} {
  if (replica >= (1u << 28)) {
    throw std::invalid_argument("RngStream: replica index must be < 2^28");
  }
}

std::array<std::uint32_t, 4> RngStream::next_block() {
  return philox4x32({counter_++, addr_[0], addr_[1], addr_[2]}, key_);
}

std::uint64_t RngStream::next_u64() {
  const auto b = next_block();
  return (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
}

double RngStream::next_double() {
  // 53 random mantissa bits -> uniform on [0, 1).
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_gaussian() {
  if (has_cached_gaussian_) {
    has_cached_gaussian_ = false;
    return cached_gaussian_;
  }
  const auto b = next_block();
  const std::uint64_t w1 =
      (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
  const std::uint64_t w2 =
      (static_cast<std::uint64_t>(b[2]) << 32) | b[3];
  // u1 on (0, 1] so the log is finite; u2 on [0, 1).
  const double u1 = static_cast<double>((w1 >> 11) + 1) * 0x1.0p-53;
  const double u2 = static_cast<double>(w2 >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * M_PI * u2;
  cached_gaussian_ = r * std::sin(phi);
  has_cached_gaussian_ = true;
  return r * std::cos(phi);
}

std::uint64_t RngStream::next_index(std::uint64_t bound) {
  if (bound == 0) {
    throw std::invalid_argument("RngStream::next_index: bound must be >= 1");
  }
  // Classic unbiased modulo: reject the incomplete top range.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= threshold) return r % bound;
  }
}

}  // namespace edas
