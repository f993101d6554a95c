#ifndef EDAS_RNG_HPP
#define EDAS_RNG_HPP

#include <array>
#include <cstdint>

namespace edas {

// Counter-based random streams (Philox-4x32-10, Salmon et al. 2011).
//
// Every random draw in the lab is addressed by the tuple
// (seed, domain, replica, agent, iteration, draw-counter), so a draw is a pure
// function of its address.  This is what makes replica-parallel runs
// bit-identical regardless of thread count or scheduling: there is no shared
// generator state to race on, and no draw depends on how many draws other
// agents or replicas consumed.
//
// Address layout inside the 128-bit Philox counter:
//   word0 = running draw counter within the stream
//   word1 = iteration
//   word2 = agent
//   word3 = (domain << 28) | replica        (so replica < 2^28)
// The 64-bit user seed forms the Philox key.

namespace rng_domain {
constexpr std::uint32_t kNoise = 0;    // stochastic-gradient sampling during runs
constexpr std::uint32_t kData = 1;     // synthetic dataset generation
constexpr std::uint32_t kShuffle = 2;  // dataset shuffling / partitioning
constexpr std::uint32_t kProbe = 3;    // test-side probes (oracle checks etc.)
}  // namespace rng_domain

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint32_t domain, std::uint32_t replica,
            std::uint32_t agent, std::uint32_t iteration);

  std::uint64_t next_u64();
  // Uniform on [0, 1).
  double next_double();
  // Standard normal via Box-Muller; draws come in cached pairs.
  double next_gaussian();
  // Uniform integer on [0, bound); unbiased (rejection sampling).  bound >= 1.
  std::uint64_t next_index(std::uint64_t bound);

 private:
  std::array<std::uint32_t, 4> next_block();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 3> addr_;  // iteration, agent, domain|replica
  std::uint32_t counter_ = 0;
  double cached_gaussian_ = 0.0;
  bool has_cached_gaussian_ = false;
};

}  // namespace edas

#endif  // EDAS_RNG_HPP
