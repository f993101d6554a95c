#ifndef EDAS_IDX_HPP
#define EDAS_IDX_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "edas/problems.hpp"

namespace edas {

// IDX binary container (the MNIST distribution format): 4-byte magic
// 0x00 0x00 <type> <ndims>, then ndims big-endian uint32 extents, then the
// payload in row-major order.  Only type 0x08 (unsigned byte) is supported.
struct IdxData {
  std::vector<std::uint32_t> dims;
  std::vector<std::uint8_t> bytes;
};

IdxData parse_idx_u8(const std::vector<std::uint8_t>& raw,
                     const std::string& origin);
IdxData load_idx_u8(const std::string& path);

struct MnistPartitionOptions {
  int per_agent = 100;
  int digit_positive = 1;  // mapped to label +1
  int digit_negative = 2;  // mapped to label -1
  // Disjoint blocks of a seeded shuffle (default); when false each agent
  // samples its shard uniformly with replacement instead.
  bool disjoint = true;
  std::uint64_t seed = 0;
};

// Filter two digit classes out of an MNIST image/label pair, scale pixels to
// [0, 1], append a constant bias coordinate, and split across `num_agents`
// agents.  Errors if the filtered pool is smaller than num_agents * per_agent
// in disjoint mode.
std::vector<LogisticShard> mnist_binary_partition(
    const IdxData& images, const IdxData& labels, int num_agents,
    const MnistPartitionOptions& options);

std::vector<LogisticShard> load_mnist_binary_partition(
    const std::string& images_path, const std::string& labels_path,
    int num_agents, const MnistPartitionOptions& options);

}  // namespace edas

#endif  // EDAS_IDX_HPP
